"""Permutation tests of joint independence and power curves."""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .estimators import (
    build_plan,
    check_estimator_name,
    draw_landmarks,
    n_hsic0,
    n_mhsic,
    nystrom_size,
    u_hsic_from_grams,
    v_hsic_from_grams,
)
from .estimators._api import _kernel_param, as_sample
from .exceptions import InvalidInputError
from .kernels import gram, resolve_specs
from .rng import derive_seed, make_rng
from .validation import check_multisample

__all__ = [
    "TestConfig",
    "TestResult",
    "PowerRow",
    "permutation_test",
    "p_value_from_null",
    "power_curve",
    "PermutationTest",
    "default_n_jobs",
]


def default_n_jobs() -> int:
    """Worker cap from ``MHSIC_THREADS`` (``0`` or unset means one per CPU)."""
    raw = os.environ.get("MHSIC_THREADS", "0").strip() or "0"
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidInputError(f"MHSIC_THREADS must be an integer, got {raw!r}") from exc
    if value < 0:
        raise InvalidInputError("MHSIC_THREADS must be >= 0")
    return value or (os.cpu_count() or 1)


@dataclass(frozen=True)
class TestConfig:
    """Settings of a permutation test.

    ``permute="rest"`` shuffles components ``2..M`` independently and keeps
    component 1 fixed; ``"first"`` shuffles components ``1..M-1`` and keeps
    the last one fixed. ``freeze_plan`` reuses the observed statistic's
    landmark rows in every round instead of drawing fresh ones.
    """

    __test__ = False  # not a pytest class

    num_permutations: int = 250
    alpha: float = 0.05
    estimator: str = "vhsic"
    nystrom_schedule: object = "2sqrt"
    rng_seed: int = 0
    freeze_plan: bool = False
    permute: str = "rest"
    rel_tol: float | None = None
    n_jobs: int = 1

    def __post_init__(self):
        if int(self.num_permutations) < 1:
            raise InvalidInputError("num_permutations must be >= 1")
        if not 0.0 < float(self.alpha) < 1.0:
            raise InvalidInputError("alpha must lie in (0, 1)")
        if self.permute not in ("rest", "first"):
            raise InvalidInputError(f"permute must be 'rest' or 'first', got {self.permute!r}")
        check_estimator_name(self.estimator)
        if self.n_jobs < 1:
            raise InvalidInputError("n_jobs must be >= 1")


@dataclass(frozen=True)
class TestResult:
    __test__ = False

    statistic: float
    null_samples: np.ndarray
    p_value: float
    reject: bool
    alpha: float
    estimator: str
    n_prime: int | None = None
    runtime_s: float = field(default=0.0, compare=False)

    def to_dict(self, include_null: bool = False) -> dict:
        out = {
            "estimator": self.estimator,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "reject": self.reject,
            "alpha": self.alpha,
            "num_permutations": int(self.null_samples.size),
            "n_prime": self.n_prime,
        }
        if include_null:
            out["null_samples"] = [float(v) for v in self.null_samples]
        return out


def p_value_from_null(statistic: float, null_samples) -> float:
    """One-sided permutation p-value ``(1 + #{null >= statistic}) / (1 + P)``."""
    null = np.asarray(null_samples, dtype=float)
    return float((1 + np.count_nonzero(null >= statistic)) / (1 + null.size))


class _Statistic:
    """The statistic under test, evaluated on the observed or a permuted sample."""

    def __init__(self, sample, specs, config: TestConfig):
        self.sample = sample
        self.specs = specs
        self.config = config
        self.name = config.estimator
        self.n_prime = None
        if self.name in ("vhsic", "uhsic"):
            self.grams = [gram(s, x) for s, x in zip(specs, sample)]
            n = sample.n
            self.rowsums = [K.sum(axis=1) for K in self.grams]
            # the marginal term of the V-statistic is invariant under row permutations
            self.marginal = float(np.prod([r.sum() / n**2 for r in self.rowsums]))
        else:
            self.n_prime = nystrom_size(config.nystrom_schedule, sample.n)
            self.frozen = None
            if config.freeze_plan:
                self.frozen = draw_landmarks(
                    sample.n, self.n_prime, derive_seed(config.rng_seed, "plan", "observed")
                )

    def __call__(self, perms, label) -> float:
        if perms is None and self.name in ("vhsic", "uhsic"):
            if self.name == "vhsic":
                return v_hsic_from_grams(self.grams)
            return u_hsic_from_grams(self.grams)
        if self.name == "vhsic":
            return self._permuted_vhsic(perms)
        if self.name == "uhsic":
            return u_hsic_from_grams(
                [K if p is None else self._permuted(m, p) for m, (K, p) in enumerate(zip(self.grams, perms))]
            )
        sample = self.sample if perms is None else self.sample.permute_components(perms)
        if self.frozen is not None:
            indices = self.frozen
        else:
            indices = draw_landmarks(
                sample.n, self.n_prime, derive_seed(self.config.rng_seed, "plan", label)
            )
        if self.name == "nmhsic":
            plan = build_plan(sample, self.specs, indices=indices, rel_tol=self.config.rel_tol)
            return n_mhsic(sample, self.specs, plan).squared
        return n_hsic0(sample, self.specs, indices=indices, rel_tol=self.config.rel_tol).squared

    def _permuted(self, m, p):
        return self.grams[m][np.ix_(p, p)]

    def _permuted_vhsic(self, perms) -> float:
        n = self.sample.n
        joint = None
        cross = np.ones(n)
        for m, (K, p) in enumerate(zip(self.grams, perms)):
            Kp = K if p is None else self._permuted(m, p)
            if joint is None:
                joint = Kp.copy() if p is None else Kp
            else:
                joint *= Kp
            cross *= self.rowsums[m] if p is None else self.rowsums[m][p]
        return float(joint.sum() / n**2 + self.marginal - 2.0 * cross.sum() / n ** (len(perms) + 1))


def _round_perms(config: TestConfig, n: int, M: int, r: int) -> list:
    rng = make_rng(derive_seed(config.rng_seed, "perm", r))
    if config.permute == "rest":
        return [None] + [rng.permutation(n) for _ in range(M - 1)]
    return [rng.permutation(n) for _ in range(M - 1)] + [None]


def permutation_test(sample, specs=None, config: TestConfig | None = None) -> TestResult:
    """Permutation test of joint independence.

    The statistic (the signed squared estimate) is computed on the sample
    and on ``num_permutations`` copies whose rows are shuffled per
    component, each round with its own seed derived from ``rng_seed``.
    Nystrom estimators draw fresh landmarks every round unless
    ``freeze_plan`` is set. Kernel bandwidths are resolved once on the
    observed sample and shared by all rounds. Results do not depend on
    ``n_jobs``.
    """
    config = config or TestConfig()
    sample = check_multisample(sample)
    if sample.n < 2:
        raise InvalidInputError("permutation test needs n >= 2")
    name = check_estimator_name(config.estimator, sample.M)
    t0 = time.perf_counter()
    specs = resolve_specs(specs, sample)
    stat = _Statistic(sample, specs, config)
    observed = stat(None, "observed")
    rounds = range(int(config.num_permutations))

    def one(r):
        return stat(_round_perms(config, sample.n, sample.M, r), r)

    if config.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=config.n_jobs) as pool:
            null = np.fromiter(pool.map(one, rounds), dtype=float, count=len(rounds))
    else:
        null = np.fromiter((one(r) for r in rounds), dtype=float, count=len(rounds))
    p = p_value_from_null(observed, null)
    return TestResult(
        statistic=float(observed),
        null_samples=null,
        p_value=p,
        reject=bool(p <= config.alpha),
        alpha=float(config.alpha),
        estimator=name,
        n_prime=stat.n_prime,
        runtime_s=time.perf_counter() - t0,
    )


@dataclass(frozen=True)
class PowerRow:
    n: int
    power: float
    mean_runtime_s: float
    trials: int


def power_curve(
    generator: Callable[[int, int], object],
    config: TestConfig,
    n_grid: Sequence[int],
    trials: int,
    specs=None,
) -> list:
    """Rejection rate and mean wall-clock per test over a grid of sample sizes.

    ``generator(n, seed)`` returns a sample. Trial ``t`` at size ``n`` draws
    its data and its test seed from ``config.rng_seed``, ``n`` and ``t``.
    """
    if int(trials) < 1:
        raise InvalidInputError("trials must be >= 1")
    n_grid = [int(n) for n in n_grid]
    if not n_grid:
        raise InvalidInputError("empty sample-size grid")
    rows = []
    for n in n_grid:
        rejections = 0
        elapsed = 0.0
        for t in range(int(trials)):
            data = generator(n, derive_seed(config.rng_seed, "data", n, t))
            cfg = _with_seed(config, derive_seed(config.rng_seed, "test", n, t))
            result = permutation_test(data, specs, cfg)
            rejections += result.reject
            elapsed += result.runtime_s
        rows.append(PowerRow(n, rejections / trials, elapsed / trials, int(trials)))
    return rows


def _with_seed(config: TestConfig, seed: int) -> TestConfig:
    return replace(config, rng_seed=int(seed))


class PermutationTest(BaseEstimator):
    """Permutation test of joint independence, scikit-learn style.

    ``fit(X, y)`` tests two arrays against each other; ``fit([X1, ..., XM])``
    tests the joint independence of ``M`` blocks.

    Attributes
    ----------
    statistic_ : float
    null_distribution_ : ndarray of shape (num_permutations,)
    p_value_ : float
    reject_ : bool
    kernels_ : list of KernelSpec
    """

    def __init__(
        self,
        estimator="vhsic",
        num_permutations=250,
        alpha=0.05,
        kernel=None,
        n_nystrom="2sqrt",
        freeze_plan=False,
        rel_tol=None,
        n_jobs=1,
        random_state=0,
    ):
        self.estimator = estimator
        self.num_permutations = num_permutations
        self.alpha = alpha
        self.kernel = kernel
        self.n_nystrom = n_nystrom
        self.freeze_plan = freeze_plan
        self.rel_tol = rel_tol
        self.n_jobs = n_jobs
        self.random_state = random_state

    def fit(self, X, y=None):
        sample = as_sample(X, y)
        config = TestConfig(
            num_permutations=self.num_permutations,
            alpha=self.alpha,
            estimator=self.estimator,
            nystrom_schedule=self.n_nystrom,
            rng_seed=int(self.random_state or 0),
            freeze_plan=self.freeze_plan,
            rel_tol=self.rel_tol,
            n_jobs=self.n_jobs,
        )
        self.kernels_ = resolve_specs(_kernel_param(self.kernel, sample.M), sample)
        result = permutation_test(sample, self.kernels_, config)
        self.result_ = result
        self.statistic_ = result.statistic
        self.null_distribution_ = result.null_samples
        self.p_value_ = result.p_value
        self.reject_ = result.reject
        return self
