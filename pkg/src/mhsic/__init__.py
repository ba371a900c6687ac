"""Kernel joint-independence testing with Nystrom-accelerated HSIC."""

__version__ = "0.1.0"

from .causal import (
    AnmDagDiscovery,
    Dag,
    DagScore,
    discover,
    enumerate_dags,
    enumerate_full_dags,
    krr_residuals,
    score_dag,
)
from .data import CsvSchema, GeneratorSpec, generate, load_csv, subsample
from .estimators import (
    HSIC,
    HsicValue,
    NystromPlan,
    build_plan,
    compute_statistic,
    n_hsic0,
    n_mhsic,
    u_hsic,
    v_hsic,
    v_hsic_trace2,
)
from .exceptions import (
    CsvParseError,
    DataError,
    DegenerateSampleError,
    InvalidInputError,
    MHSICError,
    UnsupportedSizeError,
)
from .kernels import KernelSpec, gram, kernel_eval, median_heuristic
from .testing import PermutationTest, TestConfig, TestResult, permutation_test, power_curve
from .validation import MultiSample

__all__ = [
    "AnmDagDiscovery",
    "CsvParseError",
    "CsvSchema",
    "Dag",
    "DagScore",
    "DataError",
    "DegenerateSampleError",
    "GeneratorSpec",
    "HSIC",
    "HsicValue",
    "InvalidInputError",
    "KernelSpec",
    "MHSICError",
    "MultiSample",
    "NystromPlan",
    "PermutationTest",
    "TestConfig",
    "TestResult",
    "UnsupportedSizeError",
    "build_plan",
    "compute_statistic",
    "discover",
    "enumerate_dags",
    "enumerate_full_dags",
    "generate",
    "gram",
    "kernel_eval",
    "krr_residuals",
    "load_csv",
    "median_heuristic",
    "n_hsic0",
    "n_mhsic",
    "permutation_test",
    "power_curve",
    "score_dag",
    "subsample",
    "u_hsic",
    "v_hsic",
    "v_hsic_trace2",
]
