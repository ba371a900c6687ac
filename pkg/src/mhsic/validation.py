"""Input validation and the joint-sample container."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import InvalidInputError

__all__ = ["MultiSample", "check_component", "check_multisample"]


def check_component(x, name: str = "component") -> np.ndarray:
    """Coerce one component block to a finite ``(n, d)`` float array.

    One-dimensional input is read as ``n`` scalar observations.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 1-D or 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"{name} must have n >= 1 and d >= 1, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains NaN or infinite values")
    return arr


@dataclass(frozen=True)
class MultiSample:
    """An i.i.d. sample of M-tuples stored as M row-aligned blocks.

    Row ``i`` of every block together forms joint observation ``i``.
    """

    components: tuple

    def __post_init__(self):
        blocks = tuple(
            check_component(c, name=f"component {m}")
            for m, c in enumerate(self.components)
        )
        if not blocks:
            raise InvalidInputError("a sample needs at least one component")
        n = blocks[0].shape[0]
        for m, b in enumerate(blocks):
            if b.shape[0] != n:
                raise InvalidInputError(
                    f"component {m} has {b.shape[0]} rows, expected {n}"
                )
        object.__setattr__(self, "components", blocks)

    @property
    def n(self) -> int:
        return self.components[0].shape[0]

    @property
    def M(self) -> int:
        return len(self.components)

    @property
    def dims(self) -> tuple:
        return tuple(c.shape[1] for c in self.components)

    def __len__(self):
        return self.M

    def __getitem__(self, m):
        return self.components[m]

    def __iter__(self):
        return iter(self.components)

    def take(self, rows) -> "MultiSample":
        """Same rows selected from every component."""
        rows = np.asarray(rows, dtype=np.intp)
        return MultiSample(tuple(c[rows] for c in self.components))

    def permute_components(self, perms: Sequence) -> "MultiSample":
        """Reorder rows of each component independently; ``None`` leaves a block as is."""
        if len(perms) != self.M:
            raise InvalidInputError("need one permutation (or None) per component")
        return MultiSample(
            tuple(c if p is None else c[np.asarray(p)] for c, p in zip(self, perms))
        )

    def to_array(self) -> np.ndarray:
        """Horizontally stacked ``(n, sum(d_m))`` view of all components."""
        return np.hstack(self.components)


def check_multisample(sample, min_components: int = 1) -> MultiSample:
    """Accept a :class:`MultiSample` or a sequence of arrays and validate it."""
    if not isinstance(sample, MultiSample):
        if isinstance(sample, np.ndarray):
            raise InvalidInputError(
                "pass a sequence of component blocks, not a single array"
            )
        sample = MultiSample(tuple(sample))
    if sample.M < min_components:
        raise InvalidInputError(
            f"need at least {min_components} components, got {sample.M}"
        )
    return sample
