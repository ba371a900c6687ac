from __future__ import annotations

from sklearn.base import BaseEstimator

from ..exceptions import InvalidInputError
from ..kernels import KernelSpec, parse_kernel_spec, resolve_specs
from ..validation import MultiSample, check_multisample
from ._nystrom import build_plan, draw_landmarks, n_hsic0, n_mhsic, nystrom_size
from ._types import HsicValue
from ._ustat import u_hsic
from ._vstat import v_hsic

ESTIMATORS = ("vhsic", "nmhsic", "nhsic0", "uhsic")
NYSTROM_ESTIMATORS = ("nmhsic", "nhsic0")


def check_estimator_name(name: str, M: int | None = None) -> str:
    name = str(name).lower()
    if name not in ESTIMATORS:
        raise InvalidInputError(f"unknown estimator {name!r}; choose from {ESTIMATORS}")
    if M is not None and name == "nhsic0" and M != 2:
        raise InvalidInputError(f"nhsic0 handles exactly 2 components, got {M}")
    if M is not None and M < 2:
        raise InvalidInputError(f"need at least 2 components, got {M}")
    return name


def compute_statistic(
    sample,
    specs,
    estimator: str = "nmhsic",
    n_nystrom="2sqrt",
    seed: int = 0,
    rel_tol: float | None = None,
) -> HsicValue:
    """Evaluate one of the four estimators by name.

    ``specs`` must already be resolved when the caller wants bandwidths
    shared across calls (as the permutation test does).
    """
    sample = check_multisample(sample, min_components=2)
    estimator = check_estimator_name(estimator, sample.M)
    specs = resolve_specs(specs, sample)
    if estimator == "vhsic":
        return v_hsic(sample, specs)
    if estimator == "uhsic":
        return HsicValue(u_hsic(sample, specs))
    n_prime = nystrom_size(n_nystrom, sample.n)
    if estimator == "nmhsic":
        plan = build_plan(sample, specs, n_prime, seed=seed, rel_tol=rel_tol)
        return n_mhsic(sample, specs, plan)
    indices = draw_landmarks(sample.n, n_prime, seed)
    return n_hsic0(sample, specs, indices=indices, rel_tol=rel_tol)


def _kernel_param(kernel, M):
    if kernel is None or isinstance(kernel, KernelSpec):
        return kernel
    if isinstance(kernel, str):
        return parse_kernel_spec(kernel)
    if isinstance(kernel, (int, float)):
        return KernelSpec(gamma=float(kernel))
    return [_kernel_param(k, M) for k in kernel]


def as_sample(X, y=None) -> MultiSample:
    """``fit(X, y)`` convention: two arrays, or one sequence of component blocks."""
    if y is not None:
        return MultiSample((X, y))
    return check_multisample(X)


class HSIC(BaseEstimator):
    """Joint-independence statistic as a scikit-learn style estimator.

    Parameters
    ----------
    estimator : {"nmhsic", "vhsic", "nhsic0", "uhsic"}
    kernel : None, str, float, KernelSpec or list
        Per-component bandwidth policy; ``None`` or ``"median"`` uses the
        median heuristic, a float fixes ``gamma``.
    n_nystrom : int, str or callable
        Landmark schedule for the Nystrom estimators, e.g. ``"2sqrt"``.
    rel_tol : float or None
        Eigenvalue cut-off for the landmark pseudoinverses.
    random_state : int
        Seed of the landmark draw.

    Attributes
    ----------
    statistic_ : float
        HSIC estimate (square root of the clamped squared estimate).
    squared_ : float
        Signed estimate of squared HSIC.
    kernels_ : list of KernelSpec
        Resolved kernels.
    n_prime_ : int or None
    """

    def __init__(
        self,
        estimator="nmhsic",
        kernel=None,
        n_nystrom="2sqrt",
        rel_tol=None,
        random_state=0,
    ):
        self.estimator = estimator
        self.kernel = kernel
        self.n_nystrom = n_nystrom
        self.rel_tol = rel_tol
        self.random_state = random_state

    def fit(self, X, y=None):
        sample = as_sample(X, y)
        name = check_estimator_name(self.estimator, sample.M)
        self.kernels_ = resolve_specs(_kernel_param(self.kernel, sample.M), sample)
        self.n_prime_ = (
            nystrom_size(self.n_nystrom, sample.n) if name in NYSTROM_ESTIMATORS else None
        )
        value = compute_statistic(
            sample,
            self.kernels_,
            name,
            self.n_nystrom,
            seed=int(self.random_state or 0),
            rel_tol=self.rel_tol,
        )
        self.squared_ = value.squared
        self.statistic_ = value.value
        self.rank_deficient_ = value.rank_deficient
        self.n_components_ = sample.M
        return self

    def score(self, X, y=None) -> float:
        """Statistic of a freshly fitted copy on ``X``; larger means more dependent."""
        return self.fit(X, y).statistic_
