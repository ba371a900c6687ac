from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidInputError


@dataclass(frozen=True)
class HsicValue:
    """A squared-HSIC estimate and its clamped square root.

    ``squared`` keeps its sign (U-statistics and round-off can push it below
    zero); ``value`` is ``sqrt(max(squared, 0))``. ``rank_deficient`` is set
    by estimators that had to drop singular directions of a landmark Gram
    matrix.
    """

    squared: float
    rank_deficient: bool = False

    @property
    def value(self) -> float:
        return math.sqrt(max(self.squared, 0.0))

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class NystromPlan:
    """Landmark rows and the Nystrom mean-embedding weights built on them.

    Attributes
    ----------
    indices : ndarray of shape (n_prime,)
        Rows of the joint sample used as landmarks (drawn with replacement).
    alpha_joint : ndarray of shape (n_prime,)
        Weights for the joint embedding under the product kernel.
    alpha_marginals : tuple of ndarray
        One weight vector per component.
    n, M : int
        Size and component count of the sample the plan was built on.
    seed : int or None
        Seed that drew ``indices``; ``None`` when indices were supplied.
    """

    indices: np.ndarray
    alpha_joint: np.ndarray
    alpha_marginals: tuple
    n: int
    M: int
    seed: int | None = None
    rank_deficient: bool = False

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.intp)
        if idx.ndim != 1 or idx.size < 1 or idx.size > self.n:
            raise InvalidInputError(
                f"plan needs 1 <= n_prime <= n={self.n}, got {idx.size} indices"
            )
        if idx.min() < 0 or idx.max() >= self.n:
            raise InvalidInputError("plan indices out of range")
        aj = np.asarray(self.alpha_joint, dtype=float)
        am = tuple(np.asarray(a, dtype=float) for a in self.alpha_marginals)
        if len(am) != self.M:
            raise InvalidInputError("need one marginal weight vector per component")
        for a in (aj,) + am:
            if a.shape != idx.shape:
                raise InvalidInputError("weight vectors must have length n_prime")
            if not np.all(np.isfinite(a)):
                raise InvalidInputError("weight vectors must be finite")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "alpha_joint", aj)
        object.__setattr__(self, "alpha_marginals", am)

    @property
    def n_prime(self) -> int:
        return self.indices.size

    @classmethod
    def uniform(cls, n: int, M: int) -> "NystromPlan":
        """Every row a landmark with weight ``1/n``; reproduces the V-statistic."""
        w = np.full(n, 1.0 / n)
        return cls(np.arange(n), w, tuple(w.copy() for _ in range(M)), n, M)
