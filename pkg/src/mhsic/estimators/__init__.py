"""HSIC estimators: V-statistic, trace form, U-statistic and the Nystrom family."""

from ..validation import MultiSample
from ._api import ESTIMATORS, HSIC, as_sample, check_estimator_name, compute_statistic
from ._nystrom import (
    build_plan,
    draw_landmarks,
    n_hsic0,
    n_mhsic,
    n_mhsic_terms,
    nystrom_size,
    nystrom_weights,
)
from ._population import (
    GaussianHsicOracle,
    GaussianSetup,
    gaussian_population_hsic2,
    hsic_population_gaussian_oracle,
)
from ._types import HsicValue, NystromPlan
from ._ustat import (
    distinct_tuple_sum,
    set_partitions,
    u_hsic,
    u_hsic_from_grams,
    u_hsic_terms,
)
from ._vstat import v_hsic, v_hsic_from_grams, v_hsic_trace2

__all__ = [
    "ESTIMATORS",
    "HSIC",
    "GaussianHsicOracle",
    "GaussianSetup",
    "HsicValue",
    "MultiSample",
    "NystromPlan",
    "as_sample",
    "build_plan",
    "check_estimator_name",
    "compute_statistic",
    "distinct_tuple_sum",
    "draw_landmarks",
    "gaussian_population_hsic2",
    "hsic_population_gaussian_oracle",
    "n_hsic0",
    "n_mhsic",
    "n_mhsic_terms",
    "nystrom_size",
    "nystrom_weights",
    "set_partitions",
    "u_hsic",
    "u_hsic_from_grams",
    "u_hsic_terms",
    "v_hsic",
    "v_hsic_from_grams",
    "v_hsic_trace2",
]
