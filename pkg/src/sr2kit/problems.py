"""Finite-sum smooth objectives with full and sampled evaluation.

Every problem is a mean of N per-sample terms, f(x) = (1/N) sum_i f_i(x),
with analytic gradients and (where available) a computable Lipschitz bound
on the full gradient.  Summation is always in ascending index order so
full-batch evaluation is bitwise reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError

__all__ = [
    "Dataset",
    "Problem",
    "LeastSquares",
    "Logistic",
    "TinyMLP",
    "SparseRecoveryInstance",
    "draw_sample",
    "make_least_squares",
    "make_logistic",
    "make_tiny_mlp",
    "make_sparse_recovery",
    "load_csv",
    "load_libsvm",
    "check_gradient",
]


@dataclass
class Dataset:
    features: np.ndarray  # [N, d]
    targets: np.ndarray   # [N], real or +/-1 labels

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.targets = np.asarray(self.targets, dtype=float)
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        if self.features.shape[0] != self.targets.shape[0]:
            raise ValueError(
                f"{self.features.shape[0]} rows vs {self.targets.shape[0]} targets"
            )
        if not (np.isfinite(self.features).all() and np.isfinite(self.targets).all()):
            raise ValueError("dataset contains non-finite entries")


def _check_point(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"expected shape ({n},), got {x.shape}")
    if not np.isfinite(x).all():
        raise ValueError("non-finite point")
    return x


def _check_indices(idx, N):
    idx = np.asarray(idx, dtype=int)
    if idx.size == 0:
        raise ValueError("empty sample set")
    if idx.min() < 0 or idx.max() >= N:
        raise ValueError(f"sample indices out of range [0, {N})")
    if np.unique(idx).size != idx.size:
        raise ValueError("sample indices must be unique")
    return np.sort(idx)


class Problem:
    """Finite-sum objective interface.

    Subclasses set n, N, name and implement per-sample values/gradients
    through _values(x, idx) and _grad(x, idx); sampled quantities are the
    mean over the index subset.
    """

    n: int
    N: int
    name: str
    L_bound: float | None = None
    labels: np.ndarray | None = None  # classification targets, +/-1

    def _values(self, x, idx):
        raise NotImplementedError

    def _grad(self, x, idx):
        raise NotImplementedError

    def full_value(self, x):
        x = _check_point(x, self.n)
        return float(np.mean(self._values(x, np.arange(self.N))))

    def full_grad(self, x):
        x = _check_point(x, self.n)
        return self._grad(x, np.arange(self.N))

    def sampled_value(self, x, idx):
        x = _check_point(x, self.n)
        idx = _check_indices(idx, self.N)
        return float(np.mean(self._values(x, idx)))

    def sampled_grad(self, x, idx):
        x = _check_point(x, self.n)
        idx = _check_indices(idx, self.N)
        return self._grad(x, idx)

    def margins(self, x):
        """Per-sample real-valued prediction scores (classification only)."""
        raise NotImplementedError(f"{self.name} has no classifier margins")


class LeastSquares(Problem):
    """f_i(x) = 1/2 (a_i^T x - b_i)^2."""

    def __init__(self, A, b, name="least_squares"):
        self.A = np.asarray(A, dtype=float)
        self.b = np.asarray(b, dtype=float)
        if self.A.shape[0] == 0:
            raise ValueError("empty design matrix")
        self.N, self.n = self.A.shape
        self.name = name
        # L = lambda_max(A^T A) / N, via power iteration
        self.L_bound = _power_lmax(self.A) / self.N

    def _values(self, x, idx):
        r = self.A[idx] @ x - self.b[idx]
        return 0.5 * r**2

    def _grad(self, x, idx):
        Ai = self.A[idx]
        r = Ai @ x - self.b[idx]
        return (Ai.T @ r) / idx.size


class Logistic(Problem):
    """f_i(x) = log(1 + exp(-y_i a_i^T x)), y_i in {-1, +1}."""

    def __init__(self, A, y, name="logistic"):
        self.A = np.asarray(A, dtype=float)
        self.y = np.asarray(y, dtype=float)
        if self.A.shape[0] == 0:
            raise ValueError("empty design matrix")
        if not np.all(np.isin(self.y, (-1.0, 1.0))):
            raise ValueError("labels must be in {-1, +1}")
        self.N, self.n = self.A.shape
        self.name = name
        self.labels = self.y
        # sigmoid'(t) <= 1/4
        self.L_bound = _power_lmax(self.A) / (4.0 * self.N)

    def _values(self, x, idx):
        m = self.y[idx] * (self.A[idx] @ x)
        return np.logaddexp(0.0, -m)

    def _grad(self, x, idx):
        Ai = self.A[idx]
        m = self.y[idx] * (Ai @ x)
        # d/dm log(1+e^-m) = -sigmoid(-m)
        coef = -self.y[idx] * _sigmoid(-m)
        return (Ai.T @ coef) / idx.size

    def margins(self, x):
        return self.A @ np.asarray(x, dtype=float)


class TinyMLP(Problem):
    """One-hidden-layer tanh network with hand-coded backprop.

    Parameters are the flat vector [W1 (h x d), b1 (h), w2 (h), b2].
    task "regression" uses 1/2 (out - y)^2; task "classification" uses the
    logistic loss on +/-1 labels.  tanh keeps the gradient Lipschitz on
    bounded parameter sets, unlike ReLU.
    """

    def __init__(self, features, targets, hidden, task="regression",
                 name="tiny_mlp"):
        self.A = np.asarray(features, dtype=float)
        self.y = np.asarray(targets, dtype=float)
        if self.A.shape[0] == 0:
            raise ValueError("empty dataset")
        if task not in ("regression", "classification"):
            raise ValueError(f"unknown task {task!r}")
        if task == "classification" and not np.all(np.isin(self.y, (-1.0, 1.0))):
            raise ValueError("classification labels must be in {-1, +1}")
        self.N, self.d = self.A.shape
        self.h = int(hidden)
        if self.h <= 0:
            raise ValueError("hidden must be positive")
        self.task = task
        self.n = self.h * self.d + 2 * self.h + 1
        self.name = name
        if task == "classification":
            self.labels = self.y
        self.L_bound = None  # set by estimate_local_lipschitz when needed

    def _unpack(self, x):
        h, d = self.h, self.d
        W1 = x[: h * d].reshape(h, d)
        b1 = x[h * d: h * d + h]
        w2 = x[h * d + h: h * d + 2 * h]
        b2 = x[-1]
        return W1, b1, w2, b2

    def _forward(self, x, idx):
        W1, b1, w2, b2 = self._unpack(x)
        A = self.A[idx]
        T = np.tanh(A @ W1.T + b1)     # [m, h]
        out = T @ w2 + b2              # [m]
        return A, T, w2, out

    def _values(self, x, idx):
        _, _, _, out = self._forward(x, idx)
        if self.task == "regression":
            return 0.5 * (out - self.y[idx]) ** 2
        return np.logaddexp(0.0, -self.y[idx] * out)

    def _grad(self, x, idx):
        A, T, w2, out = self._forward(x, idx)
        m = idx.size
        if self.task == "regression":
            dout = out - self.y[idx]
        else:
            yi = self.y[idx]
            dout = -yi * _sigmoid(-yi * out)
        dw2 = T.T @ dout / m
        db2 = np.sum(dout) / m
        dT = np.outer(dout, w2) * (1.0 - T**2)   # [m, h]
        dW1 = dT.T @ A / m
        db1 = np.sum(dT, axis=0) / m
        return np.concatenate([dW1.ravel(), db1, dw2, [db2]])

    def margins(self, x):
        if self.task != "classification":
            raise NotImplementedError("regression MLP has no classifier margins")
        _, _, _, out = self._forward(np.asarray(x, dtype=float),
                                     np.arange(self.N))
        return out

    def estimate_local_lipschitz(self, rng, radius=1.0, pairs=200, margin=2.0):
        """Randomized local estimate of the gradient Lipschitz constant on
        the ball of given radius; inflated by a safety margin.  The network
        loss is not globally L-smooth in the parameters, so only a local
        figure is meaningful."""
        best = 0.0
        for _ in range(pairs):
            x = rng.uniform(-radius, radius, self.n)
            y = x + rng.normal(0.0, 1e-3, self.n)
            num = np.linalg.norm(self.full_grad(x) - self.full_grad(y))
            den = np.linalg.norm(x - y)
            if den > 0:
                best = max(best, num / den)
        self.L_bound = margin * best
        return self.L_bound


def _sigmoid(t):
    out = np.empty_like(t, dtype=float)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _power_lmax(A, iters=200, tol=1e-12, seed=0):
    """Largest eigenvalue of A^T A by power iteration."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=A.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = A.T @ (A @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v_new = w / nw
        if abs(nw - lam) <= tol * max(1.0, lam):
            lam = nw
            break
        lam = nw
        v = v_new
    # small inflation so the estimate upper-bounds the true value despite
    # finite iteration count
    return lam * (1.0 + 1e-8)


def draw_sample(rng, N, batch):
    """Uniform without-replacement sample of `batch` indices from {0..N-1},
    returned in ascending order."""
    if not 1 <= batch <= N:
        raise ValueError(f"batch must be in [1, {N}], got {batch}")
    return np.sort(rng.choice(N, size=batch, replace=False))


def make_least_squares(rng, N, n, noise_sd=0.0):
    if N <= 0 or n <= 0:
        raise ValueError("N and n must be positive")
    A = rng.normal(size=(N, n))
    x_true = rng.normal(size=n)
    b = A @ x_true + noise_sd * rng.normal(size=N)
    return LeastSquares(A, b, name=f"least_squares(N={N},n={n})")


def make_logistic(rng, N, n, separation=1.0):
    if N <= 0 or n <= 0:
        raise ValueError("N and n must be positive")
    w = rng.normal(size=n)
    w /= np.linalg.norm(w)
    A = rng.normal(size=(N, n))
    y = np.where(A @ w >= 0.0, 1.0, -1.0)
    # push each class away from the separating hyperplane
    A = A + separation * np.outer(y, w)
    return Logistic(A, y, name=f"logistic(N={N},n={n})")


def make_tiny_mlp(rng, dataset, hidden, task="regression"):
    p = TinyMLP(dataset.features, dataset.targets, hidden, task=task)
    p.estimate_local_lipschitz(rng)
    return p


@dataclass
class SparseRecoveryInstance:
    problem: LeastSquares
    true_support: np.ndarray   # sorted indices of nonzeros of x_star
    x_star: np.ndarray
    l0_lambda: float           # suggested penalty for hard-threshold recovery


def make_sparse_recovery(rng, N, n, support_size, noise_sd=0.0):
    """Planted sparse least-squares instance with ground truth.

    x_star has `support_size` nonzeros with magnitudes in [0.5, 2] and
    random signs; b = A x_star + noise.  l0_lambda is tuned so that the
    hard threshold sqrt(2 lam / sigma) at sigma ~ L separates the planted
    magnitudes from zero.
    """
    if support_size > n:
        raise ValueError(f"support_size {support_size} exceeds n {n}")
    if N <= 0 or n <= 0:
        raise ValueError("N and n must be positive")
    A = rng.normal(size=(N, n))
    support = np.sort(rng.choice(n, size=support_size, replace=False))
    x_star = np.zeros(n)
    mags = rng.uniform(0.5, 2.0, size=support_size)
    signs = rng.choice((-1.0, 1.0), size=support_size)
    x_star[support] = signs * mags
    b = A @ x_star + noise_sd * rng.normal(size=N)
    p = LeastSquares(A, b, name=f"sparse_recovery(N={N},n={n},k={support_size})")
    # threshold tau = sqrt(2 lam / sigma) = 0.25 at sigma = L_bound
    tau = 0.25
    l0_lambda = 0.5 * tau**2 * p.L_bound
    return SparseRecoveryInstance(p, support, x_star, l0_lambda)


def _parse_float(tok, lineno):
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", line=lineno) from None


def load_csv(path):
    """CSV with one sample per row, last column as target.  A header row is
    auto-detected by a non-numeric first field."""
    rows = []
    ncols = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            toks = line.split(",")
            if lineno == 1:
                try:
                    float(toks[0])
                except ValueError:
                    continue  # header
            if ncols is None:
                ncols = len(toks)
                if ncols < 2:
                    raise ParseError("need at least 2 columns", line=lineno)
            elif len(toks) != ncols:
                raise ParseError(
                    f"expected {ncols} columns, got {len(toks)}", line=lineno
                )
            rows.append([_parse_float(t, lineno) for t in toks])
    if not rows:
        raise ParseError(f"no data rows in {path}")
    data = np.array(rows)
    return Dataset(features=data[:, :-1], targets=data[:, -1])


def load_libsvm(path, n_features=None):
    """LIBSVM sparse text format: 'label idx:val ...' with 1-based indices."""
    labels = []
    entries = []  # list of dict {0-based idx: val}
    max_idx = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#")[0].strip()
            if not line:
                continue
            toks = line.split()
            labels.append(_parse_float(toks[0], lineno))
            row = {}
            for tok in toks[1:]:
                if ":" not in tok:
                    raise ParseError(f"expected idx:val, got {tok!r}", line=lineno)
                idx_s, val_s = tok.split(":", 1)
                try:
                    idx = int(idx_s)
                except ValueError:
                    raise ParseError(f"bad index {idx_s!r}", line=lineno) from None
                if idx < 1:
                    raise ParseError(f"indices are 1-based, got {idx}", line=lineno)
                row[idx - 1] = _parse_float(val_s, lineno)
                max_idx = max(max_idx, idx)
            entries.append(row)
    if not labels:
        raise ParseError(f"no data rows in {path}")
    d = n_features if n_features is not None else max_idx
    if max_idx > d:
        raise ParseError(f"index {max_idx} exceeds declared dimension {d}")
    X = np.zeros((len(labels), d))
    for i, row in enumerate(entries):
        for j, v in row.items():
            X[i, j] = v
    return Dataset(features=X, targets=np.array(labels))


def check_gradient(p, x, h=1e-6, rtol=1e-5, atol=1e-8):
    """Central finite-difference certification of full_grad at x.

    Returns (ok, max_rel_err); each coordinate of the analytic gradient
    must match the difference quotient within rtol (plus atol for near-zero
    components).
    """
    x = np.asarray(x, dtype=float)
    g = p.full_grad(x)
    worst = 0.0
    for i in range(p.n):
        e = np.zeros_like(x)
        e[i] = h
        fd = (p.full_value(x + e) - p.full_value(x - e)) / (2.0 * h)
        err = abs(fd - g[i]) / (abs(fd) + atol / rtol)
        worst = max(worst, err)
    return worst <= rtol, worst
