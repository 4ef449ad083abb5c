"""Minibatch training on l1-regularized logistic regression.

Three solvers on the same problem, same seed, same batch stream:

  * the adaptive solver (accept/reject with automatic sigma)
  * a fixed-step proximal baseline at alpha = 1/L
  * an interpolated proximal variant that averages toward the prox point

The headline is not accuracy (all three separate the data) but how many
weights each leaves near zero.
"""

import math

import numpy as np

from sr2kit import L1, SolverConfig, run
from sr2kit.baselines import BaselineConfig, run_proxgen, run_proxsgd
from sr2kit.diagnostics import accuracy, sparsity_report
from sr2kit.problems import make_logistic

rng = np.random.default_rng(7)
p = make_logistic(rng, N=2000, n=50, separation=1.0)
lam = 1e-4
epochs = 20
iters = epochs * math.ceil(p.N / 128)

runs = {}
runs["adaptive"] = run(p, L1(lam), np.zeros(p.n),
                       SolverConfig(batch_size=128, max_iter=iters,
                                    epsilon=1e-8, seed=1))
runs["fixed-step"] = run_proxgen(p, L1(lam), np.zeros(p.n),
                                 BaselineConfig(alpha=1.0 / p.L_bound,
                                                batch_size=128,
                                                max_iter=iters, seed=1))
runs["interpolated"] = run_proxsgd(p, L1(lam), np.zeros(p.n),
                                   BaselineConfig(alpha=min(1.0, 1.0 / p.L_bound),
                                                  batch_size=128,
                                                  max_iter=iters, seed=1))

print(f"{'solver':<14} {'accuracy':>9} {'%|w|<=1e-3':>11} {'exact zeros':>12}")
for name, res in runs.items():
    rep = sparsity_report(res.x, thresholds=(1e-3,))
    print(f"{name:<14} {accuracy(p, res.x):>8.1f}% "
          f"{rep.pct_below[1e-3]:>10.1f}% {rep.pct_exact_zero:>11.1f}%")
