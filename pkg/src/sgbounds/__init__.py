"""Sub-Gaussian error bounds for binary and M-ary hypothesis testing."""

from .bounds import (
    BinaryBoundReport,
    DominanceRow,
    MaryBoundReport,
    dominance_map,
    fano_bound,
    gap_bound,
    mary_bounds,
    pinsker_binary,
    subgauss_binary,
    subgauss_binary_symmetric,
    uniform_delta_bound,
)
from .distributions import Bernoulli, Categorical, Gaussian, Sample, kl, load, sample
from .errors import (
    EnumerationSizeError,
    FamilyMismatchError,
    SolverError,
    SupportError,
    UnsupportedError,
    ValidationError,
)
from .subgauss import SubGaussFit, norm_table, solve_norm, subgaussian_norm
from .testing import (
    BinaryTestConfig,
    ConfusionMatrix,
    ErrorRates,
    classify_mary,
    confusion_matrix,
    exact_binary,
    simulate_binary,
)
from .verify import verify_binary, verify_bounds, verify_mary

__version__ = "0.1.0"

__all__ = [
    "Bernoulli",
    "BinaryBoundReport",
    "BinaryTestConfig",
    "Categorical",
    "ConfusionMatrix",
    "DominanceRow",
    "EnumerationSizeError",
    "ErrorRates",
    "FamilyMismatchError",
    "Gaussian",
    "MaryBoundReport",
    "Sample",
    "SolverError",
    "SubGaussFit",
    "SupportError",
    "UnsupportedError",
    "ValidationError",
    "classify_mary",
    "confusion_matrix",
    "dominance_map",
    "exact_binary",
    "fano_bound",
    "gap_bound",
    "kl",
    "load",
    "mary_bounds",
    "norm_table",
    "pinsker_binary",
    "sample",
    "simulate_binary",
    "solve_norm",
    "subgauss_binary",
    "subgauss_binary_symmetric",
    "subgaussian_norm",
    "uniform_delta_bound",
    "verify_binary",
    "verify_bounds",
    "verify_mary",
]
