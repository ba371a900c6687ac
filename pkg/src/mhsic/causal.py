"""Causal discovery under additive noise models.

A candidate DAG is scored by regressing every node on its parents with
Gaussian kernel ridge regression and testing the residuals for joint
independence; candidates are ranked by the resulting p-value.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, solve
from sklearn.base import BaseEstimator, RegressorMixin

from .exceptions import DegenerateSampleError, InvalidInputError, UnsupportedSizeError
from .kernels import KernelSpec, gram
from .rng import derive_seed, make_rng
from .testing import TestConfig, permutation_test
from .validation import MultiSample, check_component, check_multisample

logger = logging.getLogger(__name__)

__all__ = [
    "Dag",
    "DagScore",
    "AnmMechanisms",
    "enumerate_dags",
    "enumerate_full_dags",
    "krr_residuals",
    "KernelRidgeResiduals",
    "anm_mechanisms",
    "sample_anm",
    "score_dag",
    "discover",
    "AnmDagDiscovery",
]

MAX_ENUMERATE_NODES = 4
MAX_FULL_NODES = 6
DEFAULT_RIDGE = 1e-3


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph on nodes ``0..num_nodes-1`` given by parent sets."""

    num_nodes: int
    parents: tuple

    def __post_init__(self):
        parents = tuple(frozenset(int(p) for p in ps) for ps in self.parents)
        if len(parents) != self.num_nodes:
            raise InvalidInputError("need one parent set per node")
        for i, ps in enumerate(parents):
            if i in ps:
                raise InvalidInputError(f"node {i} lists itself as a parent")
            if any(p < 0 or p >= self.num_nodes for p in ps):
                raise InvalidInputError(f"parent of node {i} out of range")
        object.__setattr__(self, "parents", parents)
        if self._topological_order() is None:
            raise InvalidInputError("graph has a cycle")

    @classmethod
    def from_edges(cls, num_nodes: int, edges) -> "Dag":
        parents = [set() for _ in range(num_nodes)]
        for src, dst in edges:
            parents[dst].add(src)
        return cls(num_nodes, tuple(parents))

    def _topological_order(self):
        remaining = {i: set(ps) for i, ps in enumerate(self.parents)}
        order = []
        while remaining:
            ready = sorted(i for i, ps in remaining.items() if not ps)
            if not ready:
                return None
            for i in ready:
                order.append(i)
                del remaining[i]
            for ps in remaining.values():
                ps.difference_update(ready)
        return order

    def topological_order(self) -> list:
        return self._topological_order()

    @property
    def edges(self) -> list:
        return sorted((p, i) for i, ps in enumerate(self.parents) for p in ps)

    @property
    def num_edges(self) -> int:
        return sum(len(ps) for ps in self.parents)

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.num_nodes, self.num_nodes), dtype=int)
        for src, dst in self.edges:
            A[src, dst] = 1
        return A

    def to_dict(self) -> dict:
        return {
            "num_nodes": self.num_nodes,
            "parents": [sorted(ps) for ps in self.parents],
            "edges": [list(e) for e in self.edges],
        }

    def __str__(self):
        if not self.edges:
            return f"Dag({self.num_nodes}, no edges)"
        return "Dag(" + ", ".join(f"{a}->{b}" for a, b in self.edges) + ")"


@dataclass(frozen=True)
class DagScore:
    dag: Dag
    p_value: float
    residual_statistic: float
    index: int = 0

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "dag": self.dag.to_dict(),
            "p_value": self.p_value,
            "residual_statistic": self.residual_statistic,
        }


def _off_diagonal_pairs(M: int) -> list:
    return [(i, j) for i in range(M) for j in range(M) if i != j]


def enumerate_dags(M: int) -> list:
    """Every labelled DAG on ``M <= 4`` nodes.

    Edge ``i -> j`` is bit ``k`` of an adjacency mask, where ``k`` indexes
    the off-diagonal pairs in row-major order; DAGs come out in increasing
    mask order, so the empty graph is first.
    """
    M = int(M)
    if M < 1:
        raise InvalidInputError("need at least one node")
    if M > MAX_ENUMERATE_NODES:
        raise UnsupportedSizeError(
            f"DAG enumeration supports at most {MAX_ENUMERATE_NODES} nodes, got {M}"
        )
    pairs = _off_diagonal_pairs(M)
    out = []
    for mask in range(1 << len(pairs)):
        edges = [pairs[k] for k in range(len(pairs)) if mask >> k & 1]
        try:
            out.append(Dag.from_edges(M, edges))
        except InvalidInputError:
            continue
    return out


def enumerate_full_dags(M: int) -> list:
    """Fully connected DAGs, one per ordering of the nodes (``M!`` of them).

    Every node is a parent of all nodes after it in the ordering.
    """
    M = int(M)
    if M < 1:
        raise InvalidInputError("need at least one node")
    if M > MAX_FULL_NODES:
        raise UnsupportedSizeError(f"at most {MAX_FULL_NODES} nodes, got {M}")
    out = []
    for order in itertools.permutations(range(M)):
        parents = [set() for _ in range(M)]
        for pos, node in enumerate(order):
            parents[node].update(order[:pos])
        out.append(Dag(M, tuple(parents)))
    return out


def _fit_kernels(X, spec, additive):
    """Resolved kernels as ``(columns, spec)`` pairs; columns without spread are dropped."""
    groups = [[j] for j in range(X.shape[1])] if additive else [list(range(X.shape[1]))]
    out = []
    for cols in groups:
        try:
            out.append((cols, spec.resolve(X[:, cols])))
        except DegenerateSampleError:
            logger.warning("regressors %s have no spread; left out of the regression", cols)
    return out


def _regression_gram(kernels, rows, cols=None):
    K = None
    for idx, spec in kernels:
        G = gram(spec, rows[:, idx], None if cols is None else cols[:, idx])
        K = G if K is None else K + G
    return K


def krr_residuals(
    y, X=None, ridge: float = DEFAULT_RIDGE, spec: KernelSpec | None = None, additive: bool = True
) -> np.ndarray:
    """Residuals of Gaussian kernel ridge regression of ``y`` on ``X``.

    ``y`` is centred first, then ``r = yc - K (K + n * ridge * I)^{-1} yc``.
    With ``additive`` (the default) ``K`` is the sum of one Gaussian Gram
    matrix per column of ``X``, so the fit is a sum of smooth univariate
    functions; otherwise ``K`` is a single Gram matrix on all columns.
    Bandwidths follow the median heuristic unless ``spec`` fixes them.
    Without regressors (``X`` is ``None`` or has no columns) the residual is
    ``y - mean(y)``; the same holds, with a warning, if ``X`` has no spread.
    """
    y = check_component(y, "y")
    if y.shape[1] != 1:
        raise InvalidInputError("y must be one-dimensional")
    y = y[:, 0]
    yc = y - y.mean()
    if X is None:
        return yc
    X = np.asarray(X, dtype=float)
    if X.ndim == 2 and X.shape[1] == 0:
        return yc
    X = check_component(X, "X")
    n = y.shape[0]
    if X.shape[0] != n:
        raise InvalidInputError(f"X has {X.shape[0]} rows, y has {n}")
    if not ridge > 0:
        raise InvalidInputError("ridge must be positive")
    kernels = _fit_kernels(X, spec or KernelSpec(), additive)
    if not kernels:
        return yc
    K = _regression_gram(kernels, X)
    A = K + n * ridge * np.eye(n)
    try:
        coef = cho_solve(cho_factor(A, lower=True), yc)
    except LinAlgError:
        coef = solve(A, yc, assume_a="sym")
    return yc - K @ coef


class KernelRidgeResiduals(RegressorMixin, BaseEstimator):
    """Gaussian kernel ridge regression with a fitted intercept.

    Minimises ``||yc - K c||^2 / n + ridge * c' K c`` on centred targets,
    with ``K`` additive over the columns of ``X`` unless ``additive=False``.
    ``residuals_`` holds the in-sample residuals that causal scoring uses.
    """

    def __init__(self, ridge=DEFAULT_RIDGE, gamma=None, additive=True):
        self.ridge = ridge
        self.gamma = gamma
        self.additive = additive

    def fit(self, X, y):
        X = check_component(X, "X")
        y = check_component(y, "y")[:, 0]
        if X.shape[0] != y.shape[0]:
            raise InvalidInputError("X and y disagree on the number of rows")
        if not self.ridge > 0:
            raise InvalidInputError("ridge must be positive")
        n = y.shape[0]
        self.intercept_ = float(y.mean())
        self.kernels_ = _fit_kernels(X, KernelSpec(gamma=self.gamma), self.additive)
        self.X_fit_ = X
        if not self.kernels_:
            self.dual_coef_ = np.zeros(n)
            self.residuals_ = y - self.intercept_
            return self
        K = _regression_gram(self.kernels_, X)
        self.dual_coef_ = solve(K + n * self.ridge * np.eye(n), y - self.intercept_, assume_a="pos")
        self.residuals_ = y - self.intercept_ - K @ self.dual_coef_
        return self

    def predict(self, X):
        X = check_component(X, "X")
        if not self.kernels_:
            return np.full(X.shape[0], self.intercept_)
        return self.intercept_ + _regression_gram(self.kernels_, X, self.X_fit_) @ self.dual_coef_


@dataclass(frozen=True)
class AnmMechanisms:
    """Edge functions ``f(x) = a * tanh(b * x)`` and per-node noise scales."""

    dag: Dag
    edge_params: dict
    noise_sd: tuple


def anm_mechanisms(dag: Dag, f_seed: int) -> AnmMechanisms:
    """Draw ``a ~ U(-2, 2)``, ``b ~ U(0.5, 2)`` per edge and noise variances ``U(1, sqrt 2)``."""
    rng = make_rng(derive_seed(f_seed, "anm-mechanisms"))
    params = {}
    for edge in dag.edges:
        a = rng.uniform(-2.0, 2.0)
        b = rng.uniform(0.5, 2.0)
        params[edge] = (float(a), float(b))
    var = rng.uniform(1.0, np.sqrt(2.0), size=dag.num_nodes)
    return AnmMechanisms(dag, params, tuple(float(v) for v in np.sqrt(var)))


def sample_anm(dag: Dag, n: int, seed: int, f_seed: int | None = None) -> MultiSample:
    """Sample ``X_i = sum_{j in PA_i} f_ij(X_j) + eps_i`` in topological order."""
    if int(n) < 1:
        raise InvalidInputError("n must be >= 1")
    mech = anm_mechanisms(dag, seed if f_seed is None else f_seed)
    rng = make_rng(derive_seed(seed, "anm-noise"))
    noise = rng.standard_normal((int(n), dag.num_nodes)) * np.asarray(mech.noise_sd)
    X = np.zeros_like(noise)
    for i in dag.topological_order():
        X[:, i] = noise[:, i]
        for j in sorted(dag.parents[i]):
            a, b = mech.edge_params[(j, i)]
            X[:, i] += a * np.tanh(b * X[:, j])
    return MultiSample(tuple(X[:, [i]] for i in range(dag.num_nodes)))


def _residual_sample(sample: MultiSample, dag: Dag, ridge: float, cache=None) -> MultiSample:
    # cache maps (node, parent set) to residuals; candidates share many of them
    cache = {} if cache is None else cache
    blocks = []
    for i in range(dag.num_nodes):
        y = sample[i]
        if y.shape[1] != 1:
            raise InvalidInputError("causal scoring needs one-dimensional nodes")
        key = (i, dag.parents[i])
        if key not in cache:
            parents = sorted(dag.parents[i])
            X = np.hstack([sample[j] for j in parents]) if parents else None
            cache[key] = krr_residuals(y, X, ridge)
        blocks.append(cache[key])
    return MultiSample(tuple(blocks))


def score_dag(
    sample,
    dag: Dag,
    test_config: TestConfig | None = None,
    ridge: float = DEFAULT_RIDGE,
    _cache=None,
) -> DagScore:
    """p-value of the joint-independence test on the DAG's regression residuals.

    A single node has nothing to test and scores ``p = 1``.
    """
    sample = check_multisample(sample)
    if sample.M != dag.num_nodes:
        raise InvalidInputError(
            f"sample has {sample.M} components, DAG has {dag.num_nodes} nodes"
        )
    if dag.num_nodes == 1:
        return DagScore(dag, 1.0, 0.0)
    residuals = _residual_sample(sample, dag, ridge, _cache)
    result = permutation_test(residuals, None, test_config or TestConfig())
    return DagScore(dag, result.p_value, result.statistic)


def discover(
    sample,
    candidates,
    test_config: TestConfig | None = None,
    ridge: float = DEFAULT_RIDGE,
) -> list:
    """Score every candidate and rank by decreasing p-value.

    Candidate ``k`` is tested with a seed derived from the master seed and
    ``k``. Ties go to the DAG with fewer edges, then to the earlier
    candidate.
    """
    candidates = list(candidates)
    if not candidates:
        raise InvalidInputError("need at least one candidate DAG")
    config = test_config or TestConfig()
    sample = check_multisample(sample)
    cache = {}
    scores = []
    for k, dag in enumerate(candidates):
        cfg = replace(config, rng_seed=derive_seed(config.rng_seed, "candidate", k))
        s = score_dag(sample, dag, cfg, ridge, cache)
        scores.append(replace(s, index=k))
    return sorted(scores, key=lambda s: (-s.p_value, s.dag.num_edges, s.index))


class AnmDagDiscovery(BaseEstimator):
    """Rank candidate DAGs for ``X`` (one column or block per node).

    Parameters
    ----------
    candidates : "all", "full" or list of Dag
    estimator, num_permutations, alpha, n_nystrom, random_state :
        Passed to the residual independence tests.
    ridge : float

    Attributes
    ----------
    scores_ : list of DagScore, best first
    best_dag_ : Dag
    """

    def __init__(
        self,
        candidates="all",
        estimator="nmhsic",
        num_permutations=250,
        alpha=0.05,
        n_nystrom="2sqrt",
        ridge=DEFAULT_RIDGE,
        random_state=0,
    ):
        self.candidates = candidates
        self.estimator = estimator
        self.num_permutations = num_permutations
        self.alpha = alpha
        self.n_nystrom = n_nystrom
        self.ridge = ridge
        self.random_state = random_state

    def fit(self, X, y=None):
        if isinstance(X, (MultiSample, list, tuple)):
            sample = check_multisample(X)
        else:
            X = check_component(X, "X")
            sample = MultiSample(tuple(X[:, [j]] for j in range(X.shape[1])))
        if self.candidates == "all":
            cands = enumerate_dags(sample.M)
        elif self.candidates == "full":
            cands = enumerate_full_dags(sample.M)
        else:
            cands = list(self.candidates)
        config = TestConfig(
            num_permutations=self.num_permutations,
            alpha=self.alpha,
            estimator=self.estimator,
            nystrom_schedule=self.n_nystrom,
            rng_seed=int(self.random_state or 0),
        )
        self.scores_ = discover(sample, cands, config, self.ridge)
        self.best_dag_ = self.scores_[0].dag
        return self
