"""Magnitude pruning and the sparsity/accuracy trade-off.

Train a small classifier, then sweep pruning thresholds and report how
sparsity and accuracy move.  prune() zeroes every weight with magnitude
at or below alpha; sparsity_report() tallies exact and near zeros.
"""

import math

import numpy as np

from sr2kit import L1, SolverConfig, run
from sr2kit.diagnostics import (DEFAULT_PRUNE_THRESHOLDS, accuracy, prune,
                                sparsity_report)
from sr2kit.problems import make_logistic

rng = np.random.default_rng(11)
p = make_logistic(rng, N=1000, n=40, separation=0.8)
iters = 30 * math.ceil(p.N / 100)
res = run(p, L1(5e-4), np.zeros(p.n),
          SolverConfig(batch_size=100, max_iter=iters, epsilon=1e-9, seed=0))

print(f"trained accuracy: {accuracy(p, res.x):.1f}%")
rep = sparsity_report(res.x)
print(f"exact zeros: {rep.pct_exact_zero:.1f}%  nnz: {rep.nnz}/{rep.n}\n")

print(f"{'alpha':>8} {'pruned %':>9} {'accuracy':>9}")
for alpha in DEFAULT_PRUNE_THRESHOLDS:
    x_p, frac = prune(res.x, alpha)
    print(f"{alpha:>8.0e} {100 * frac:>8.1f}% {accuracy(p, x_p):>8.1f}%")
# aggressive thresholds eventually hurt; tiny ones are free
