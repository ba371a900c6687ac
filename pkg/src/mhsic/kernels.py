"""Gaussian kernels, median-heuristic bandwidths and Gram matrices."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .exceptions import DegenerateSampleError, InvalidInputError
from .rng import derive_seed, make_rng
from .validation import check_component

__all__ = [
    "KernelSpec",
    "kernel_eval",
    "median_heuristic",
    "gram",
    "resolve_specs",
    "parse_kernel_spec",
]

# Above this many points the median heuristic runs on a seeded subsample.
MEDIAN_MAX_POINTS = 5000
_MEDIAN_SEED = 20230711

_FAMILIES = ("gaussian",)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus bandwidth policy.

    ``gamma=None`` selects the median heuristic; a positive float fixes the
    Gaussian kernel ``exp(-gamma * ||x - y||^2)``.
    """

    family: str = "gaussian"
    gamma: float | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise InvalidInputError(f"unknown kernel family {self.family!r}")
        if self.gamma is not None:
            g = float(self.gamma)
            if not np.isfinite(g) or g <= 0:
                raise InvalidInputError(f"gamma must be positive, got {self.gamma}")
            object.__setattr__(self, "gamma", g)

    @property
    def is_resolved(self) -> bool:
        return self.gamma is not None

    def resolve(self, x) -> "KernelSpec":
        """Fix the bandwidth on sample ``x`` if it is not fixed already."""
        if self.is_resolved:
            return self
        return replace(self, gamma=median_heuristic(x))

    def describe(self) -> str:
        return "median" if self.gamma is None else f"fixed:{self.gamma!r}"


def parse_kernel_spec(text: str) -> KernelSpec:
    """Parse ``median`` or ``fixed:<gamma>``."""
    text = text.strip()
    if text == "median":
        return KernelSpec()
    if text.startswith("fixed:"):
        try:
            return KernelSpec(gamma=float(text[len("fixed:"):]))
        except ValueError as exc:
            raise InvalidInputError(f"bad gamma in {text!r}") from exc
    raise InvalidInputError(f"kernel spec must be 'median' or 'fixed:<gamma>', got {text!r}")


def _require_gamma(spec: KernelSpec) -> float:
    if not spec.is_resolved:
        raise InvalidInputError("kernel bandwidth is not resolved; call resolve() first")
    return spec.gamma


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """``exp(-gamma * ||x - y||^2)`` for two points."""
    gamma = _require_gamma(spec)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidInputError(f"dimension mismatch: {x.shape} vs {y.shape}")
    diff = x - y
    return float(np.exp(-gamma * np.dot(diff, diff)))


def median_heuristic(x, max_points: int = MEDIAN_MAX_POINTS) -> float:
    """Bandwidth ``1 / (2 * median ||x_i - x_j||^2)`` over distinct pairs ``i < j``.

    Samples larger than ``max_points`` are first thinned to a seeded uniform
    subsample of that size.
    """
    x = check_component(x)
    n = x.shape[0]
    if n < 2:
        raise InvalidInputError("median heuristic needs at least two points")
    if n > max_points:
        rng = make_rng(derive_seed(_MEDIAN_SEED, "median-heuristic", n))
        x = x[np.sort(rng.choice(n, size=max_points, replace=False))]
    sigma2 = float(np.median(pdist(x, "sqeuclidean")))
    if sigma2 <= 0.0:
        raise DegenerateSampleError(
            "median squared distance is zero; sample has no spread"
        )
    return 1.0 / (2.0 * sigma2)


def gram(spec: KernelSpec, rows, cols=None) -> np.ndarray:
    """Gram matrix with entry ``(i, j) = k(rows_i, cols_j)``; ``cols`` defaults to ``rows``."""
    gamma = _require_gamma(spec)
    rows = check_component(rows, "rows")
    cols = rows if cols is None else check_component(cols, "cols")
    if rows.shape[1] != cols.shape[1]:
        raise InvalidInputError(
            f"dimension mismatch: rows have d={rows.shape[1]}, cols d={cols.shape[1]}"
        )
    D = cdist(rows, cols, "sqeuclidean")
    D *= -gamma
    return np.exp(D, out=D)


def resolve_specs(specs, sample) -> list:
    """One resolved :class:`KernelSpec` per component of ``sample``.

    ``specs`` may be ``None`` (median heuristic everywhere), a single spec
    shared by all components, or a sequence with one spec per component.
    """
    M = len(sample)
    if specs is None:
        specs = [KernelSpec()] * M
    elif isinstance(specs, KernelSpec):
        specs = [specs] * M
    else:
        specs = list(specs)
        if len(specs) != M:
            raise InvalidInputError(f"got {len(specs)} kernel specs for {M} components")
    return [s.resolve(x) for s, x in zip(specs, sample)]

