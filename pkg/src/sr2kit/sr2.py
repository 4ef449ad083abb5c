"""SR2: adaptive quadratic-regularization proximal stochastic solver.

Each iteration draws a minibatch, takes an exact shifted-prox step against
the quadratic model g^T s + (sigma/2)||s||^2 + R(x+s), compares actual to
predicted decrease (rho), and accepts or rejects the step while adapting
sigma like a trust-region radius in reverse: rejections inflate sigma,
very successful steps deflate it down to sigma_min.

Stopping uses a sliding-window mean of accepted squared step norms as an
estimator of the expected squared step length; the run stops once the
window is full and the mean falls below epsilon^2.
"""

from __future__ import annotations

import time
import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalFailureError
from .problems import draw_sample
from .regularizers import Regularizer, reg_value, shifted_prox

__all__ = [
    "SolverConfig",
    "SolverState",
    "IterationRecord",
    "RunResult",
    "update_sigma",
    "sigma_succ_bound",
    "stationarity_estimate",
    "sr2_step",
    "run",
]

#: defaults used throughout: eta1=7.5e-4, eta2=0.99, gamma1=5.56,
#: gamma2=2.95, gamma3=0.8
DEFAULT_ETA1 = 7.5e-4
DEFAULT_ETA2 = 0.99
DEFAULT_GAMMA1 = 5.56
DEFAULT_GAMMA2 = 2.95
DEFAULT_GAMMA3 = 0.8


@dataclass
class SolverConfig:
    eta1: float = DEFAULT_ETA1
    eta2: float = DEFAULT_ETA2
    gamma1: float = DEFAULT_GAMMA1
    gamma2: float = DEFAULT_GAMMA2
    gamma3: float = DEFAULT_GAMMA3
    sigma0: float = 1.0
    sigma_min: float = 1e-6
    epsilon: float = 1e-4
    batch_size: int = 128
    max_iter: int = 1000
    seed: int = 0
    rho_mode: str = "sampled"            # "sampled" | "full"
    assumption_check: str = "off"        # "off" | "full" | "sampled-proxy"
    kappa_m: float | str = "auto"        # positive float or "auto" (= L/2)
    window: int = 25
    record_full_objective: bool = False  # audit column even in sampled mode
    allow_gamma_disorder: bool = True    # accept gamma1 > gamma2 with a warning

    def validated(self):
        if not 0 < self.eta1 <= self.eta2 < 1:
            raise ValueError("need 0 < eta1 <= eta2 < 1")
        if not 0 < self.gamma3 <= 1 < self.gamma1:
            raise ValueError("need 0 < gamma3 <= 1 < gamma1")
        if self.gamma2 < self.gamma1:
            if not self.allow_gamma_disorder:
                raise ValueError("need gamma1 <= gamma2")
            # the stock defaults have gamma1 > gamma2; the point update
            # below never uses gamma2, so this is harmless but worth noting
            warnings.warn(
                f"gamma1={self.gamma1} > gamma2={self.gamma2}; gamma2 is "
                "unused by the point sigma-update",
                stacklevel=2,
            )
        if not self.sigma0 >= self.sigma_min > 0:
            raise ValueError("need sigma0 >= sigma_min > 0")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.rho_mode not in ("sampled", "full"):
            raise ValueError(f"unknown rho_mode {self.rho_mode!r}")
        if self.assumption_check not in ("off", "full", "sampled-proxy"):
            raise ValueError(f"unknown assumption_check {self.assumption_check!r}")
        if self.kappa_m != "auto" and not (
            isinstance(self.kappa_m, (int, float)) and self.kappa_m > 0
        ):
            raise ValueError("kappa_m must be positive or 'auto'")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        return self


@dataclass
class SolverState:
    x: np.ndarray
    sigma: float
    t: int
    rng: np.random.Generator
    batch_size: int
    window: deque = field(default_factory=deque)
    successes: int = 0
    very_successes: int = 0
    failures: int = 0
    assumption_rejections: int = 0


@dataclass
class IterationRecord:
    t: int
    sigma_used: float
    rho: float
    step_norm_sq: float
    accepted: bool
    F_sampled_before: float     # composite f(x, xi) + R(x)
    F_sampled_after: float      # composite at x + s on the same batch
    F_full: float | None        # full-objective audit column
    model_decrease: float
    batch_size: int
    assumption_rejected: bool
    nnz: int
    wall_time: float


@dataclass
class RunResult:
    x: np.ndarray
    trace: list
    stop_reason: str            # "stationarity" | "budget"
    state: SolverState


def update_sigma(sigma, rho, cfg):
    """Three-branch regularization update (point representatives of the
    interval rule): shrink by gamma3 on very successful steps, hold on
    merely successful ones, inflate by gamma1 on failures."""
    if rho >= cfg.eta2:
        return max(cfg.sigma_min, cfg.gamma3 * sigma)
    if rho >= cfg.eta1:
        return sigma
    return cfg.gamma1 * sigma


def sigma_succ_bound(kappa_m, eta2):
    """Regularization level above which any nonzero step is provably
    accepted (for regularizers bounded below, whose prox-boundedness
    threshold is infinite)."""
    if not 0 < eta2 < 1:
        raise ValueError("need 0 < eta2 < 1")
    if kappa_m <= 0:
        raise ValueError("kappa_m must be positive")
    return 2.0 * kappa_m / (1.0 - eta2)


def stationarity_estimate(state):
    """Sliding-window mean of accepted squared step norms, or None while
    the window has not yet filled."""
    if len(state.window) < state.window.maxlen:
        return None
    return float(np.mean(state.window))


def _resolve_kappa(cfg, p):
    if cfg.kappa_m == "auto":
        if p.L_bound is None:
            raise ValueError(
                f"kappa_m='auto' needs a problem with L_bound ({p.name} has none)"
            )
        return 0.5 * p.L_bound
    return float(cfg.kappa_m)


def sr2_step(p, reg: Regularizer, state: SolverState, cfg: SolverConfig):
    """One SR2 iteration; mutates state and returns the IterationRecord."""
    t0 = time.perf_counter()
    x = state.x
    sigma = state.sigma
    batch = min(state.batch_size, p.N)
    idx = draw_sample(state.rng, p.N, batch)

    g = p.sampled_grad(x, idx)
    r_x = reg_value(reg, x)
    f_before = p.sampled_value(x, idx)
    F_before = f_before + r_x
    step = shifted_prox(reg, x, g, sigma)
    s = step.s
    step_norm_sq = float(s @ s)

    assumption_rejected = False
    if cfg.assumption_check != "off" and step_norm_sq > 0.0:
        kappa = _resolve_kappa(cfg, p)
        if cfg.assumption_check == "full":
            f_ref0 = p.full_value(x)
            f_ref1 = p.full_value(x + s)
        else:  # sampled-proxy: same-batch sampled objective
            f_ref0 = f_before
            f_ref1 = p.sampled_value(x + s, idx)
        if abs(f_ref1 - f_ref0 - float(g @ s)) > kappa * step_norm_sq:
            assumption_rejected = True
            s = np.zeros_like(s)
            step_norm_sq = 0.0
            state.batch_size = min(2 * state.batch_size, p.N)

    if assumption_rejected or step_norm_sq == 0.0:
        rho = 0.0
        accepted = False
        F_after = F_before
        delta_psi = 0.0
    else:
        F_after = p.sampled_value(x + s, idx) + step.reg_at_target
        delta_psi = step.model_decrease
        if cfg.rho_mode == "full":
            delta_F = (p.full_value(x) + r_x) - (
                p.full_value(x + s) + step.reg_at_target
            )
        else:
            delta_F = F_before - F_after
        if not np.isfinite(delta_F):
            if np.isnan(delta_F):
                raise NumericalFailureError(
                    "non-finite sampled objective", iteration=state.t
                )
            rho = 0.0  # extended arithmetic: infinite decrease ratio -> 0
        elif delta_psi == 0.0 or not np.isfinite(delta_psi):
            rho = 0.0
        else:
            rho = delta_F / delta_psi
            if np.isnan(rho):
                raise NumericalFailureError("rho is NaN", iteration=state.t)
        accepted = rho >= cfg.eta1

    F_full = None
    if cfg.rho_mode == "full" or cfg.record_full_objective:
        F_full = p.full_value(x) + r_x

    if accepted:
        state.x = x + s
        state.window.append(step_norm_sq)
        if rho >= cfg.eta2:
            state.very_successes += 1
        else:
            state.successes += 1
    else:
        if assumption_rejected:
            state.assumption_rejections += 1
        else:
            state.failures += 1

    state.sigma = update_sigma(sigma, rho, cfg)
    state.t += 1

    return IterationRecord(
        t=state.t,
        sigma_used=sigma,
        rho=rho,
        step_norm_sq=step_norm_sq,
        accepted=accepted,
        F_sampled_before=F_before,
        F_sampled_after=F_after,
        F_full=F_full,
        model_decrease=delta_psi,
        batch_size=batch,
        assumption_rejected=assumption_rejected,
        nnz=int(np.count_nonzero(state.x)),
        wall_time=time.perf_counter() - t0,
    )


def run(p, reg: Regularizer, x0, cfg: SolverConfig) -> RunResult:
    """Iterate sr2_step until the stationarity estimate drops below
    epsilon^2 or the iteration budget runs out."""
    cfg = cfg.validated()
    x0 = np.asarray(x0, dtype=float)
    if not np.isfinite(reg_value(reg, x0)):
        raise ValueError("starting point has infinite regularizer value")
    state = SolverState(
        x=x0.copy(),
        sigma=cfg.sigma0,
        t=0,
        rng=np.random.default_rng(cfg.seed),
        batch_size=min(cfg.batch_size, p.N),
        window=deque(maxlen=cfg.window),
    )
    trace = []
    stop_reason = "budget"
    for _ in range(cfg.max_iter):
        rec = sr2_step(p, reg, state, cfg)
        trace.append(rec)
        est = stationarity_estimate(state)
        if est is not None and est <= cfg.epsilon**2:
            stop_reason = "stationarity"
            break
    return RunResult(x=state.x, trace=trace, stop_reason=stop_reason, state=state)
