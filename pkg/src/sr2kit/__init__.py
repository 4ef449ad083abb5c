"""sr2kit: adaptive quadratic-regularization proximal stochastic solver
with exact sparsity prox kernels, baseline proximal solvers, and a
reproducible experiment harness."""

from .baselines import BaselineConfig, run_proxgen, run_proxsgd
from .diagnostics import SparsityReport, accuracy, prune, sparsity_report
from .problems import (
    Dataset,
    LeastSquares,
    Logistic,
    Problem,
    TinyMLP,
    draw_sample,
    load_csv,
    load_libsvm,
    make_least_squares,
    make_logistic,
    make_sparse_recovery,
    make_tiny_mlp,
)
from .regularizers import (
    L0,
    L1,
    L0Ball,
    Regularizer,
    StepVector,
    Zero,
    reg_value,
    shifted_prox,
)
from .sr2 import (
    IterationRecord,
    RunResult,
    SolverConfig,
    run,
    sigma_succ_bound,
    update_sigma,
)

__version__ = "0.1.0"
