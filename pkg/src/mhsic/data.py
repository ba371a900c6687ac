"""Seeded synthetic samples and CSV ingestion."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .causal import Dag, sample_anm
from .exceptions import CsvParseError, DataError, InvalidInputError
from .rng import derive_seed, make_rng
from .validation import MultiSample, check_multisample

__all__ = ["GeneratorSpec", "generate", "CsvSchema", "load_csv", "subsample", "GENERATOR_KINDS"]

GENERATOR_KINDS = ("indep", "linear", "anm")
_ALIASES = {"dependent": "linear", "independent": "indep"}


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for a synthetic sample.

    kind : "indep", "linear" or "anm"
        ``indep``: ``M`` independent standard normal blocks of width ``d``.
        ``linear``: ``X1 ~ N(0, 1)`` and ``X2 = X1 + eps`` with
        ``eps ~ N(0, noise_sd^2)``.
        ``anm``: additive noise model on ``dag`` with edge functions seeded by
        ``f_seed`` (defaults to ``seed``).
    """

    kind: str
    n: int
    seed: int = 0
    M: int = 2
    d: int = 1
    noise_sd: float = 1.0
    dag: Dag | None = None
    f_seed: int | None = None

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in GENERATOR_KINDS:
            raise InvalidInputError(f"unknown generator {self.kind!r}; choose from {GENERATOR_KINDS}")
        object.__setattr__(self, "kind", kind)
        if int(self.n) < 1:
            raise InvalidInputError("n must be >= 1")
        if kind == "indep" and (int(self.M) < 1 or int(self.d) < 1):
            raise InvalidInputError("M and d must be >= 1")
        if kind == "linear" and not (math.isfinite(self.noise_sd) and self.noise_sd >= 0):
            raise InvalidInputError("noise_sd must be finite and >= 0")
        if kind == "anm" and not isinstance(self.dag, Dag):
            raise InvalidInputError("anm generator needs a Dag")


def generate(spec: GeneratorSpec) -> MultiSample:
    n = int(spec.n)
    if spec.kind == "indep":
        rng = make_rng(derive_seed(spec.seed, "indep"))
        return MultiSample(tuple(rng.standard_normal((n, spec.d)) for _ in range(spec.M)))
    if spec.kind == "linear":
        rng = make_rng(derive_seed(spec.seed, "linear"))
        x1 = rng.standard_normal((n, 1))
        eps = rng.standard_normal((n, 1))
        return MultiSample((x1, x1 + spec.noise_sd * eps))
    return sample_anm(spec.dag, n, spec.seed, spec.f_seed)


@dataclass(frozen=True)
class CsvSchema:
    """How CSV columns map onto components.

    ``column_roles[j]`` is the component index of column ``j`` or ``None``
    to ignore it. Without roles every column is its own component.
    """

    column_roles: tuple | None = None
    has_header: bool = False
    delimiter: str = ","

    def __post_init__(self):
        if len(self.delimiter) != 1:
            raise InvalidInputError("delimiter must be a single character")
        if self.column_roles is not None:
            roles = tuple(None if r is None else int(r) for r in self.column_roles)
            used = sorted({r for r in roles if r is not None})
            if not used:
                raise InvalidInputError("column_roles assigns no column")
            if used != list(range(len(used))):
                raise InvalidInputError(
                    f"component indices must be 0..M-1 with none skipped, got {used}"
                )
            object.__setattr__(self, "column_roles", roles)


def load_csv(path, schema: CsvSchema | None = None) -> MultiSample:
    """Read a numeric CSV into a sample; rows are joint observations."""
    schema = schema or CsvSchema()
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    rows = []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=schema.delimiter)
        for lineno, record in enumerate(reader, start=1):
            if lineno == 1 and schema.has_header:
                continue
            if not record or all(not cell.strip() for cell in record):
                continue
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise CsvParseError(
                    f"expected {width} fields, found {len(record)}", row=lineno
                )
            values = []
            for col, cell in enumerate(record, start=1):
                try:
                    v = float(cell)
                except ValueError:
                    raise CsvParseError(f"non-numeric cell {cell!r}", row=lineno, column=col) from None
                if not math.isfinite(v):
                    raise CsvParseError(f"non-finite cell {cell!r}", row=lineno, column=col)
                values.append(v)
            rows.append(values)
    if not rows:
        raise DataError(f"{path} contains no data rows")
    table = np.asarray(rows, dtype=float)
    roles = schema.column_roles
    if roles is None:
        roles = tuple(range(width))
    if len(roles) != width:
        raise DataError(f"schema has {len(roles)} column roles, file has {width} columns")
    M = max(r for r in roles if r is not None) + 1
    blocks = tuple(table[:, [j for j, r in enumerate(roles) if r == m]] for m in range(M))
    return MultiSample(blocks)


def subsample(sample, n_out: int, seed: int) -> MultiSample:
    """Rows drawn uniformly without replacement, shared by all components."""
    sample = check_multisample(sample)
    n_out = int(n_out)
    if not 1 <= n_out <= sample.n:
        raise InvalidInputError(f"need 1 <= n_out <= {sample.n}, got {n_out}")
    rows = make_rng(derive_seed(seed, "subsample")).choice(sample.n, size=n_out, replace=False)
    return sample.take(rows)
