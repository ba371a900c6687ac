import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import kernel_matrix

from mhsic.causal import (
    AnmDagDiscovery,
    Dag,
    KernelRidgeResiduals,
    anm_mechanisms,
    discover,
    enumerate_dags,
    enumerate_full_dags,
    krr_residuals,
    sample_anm,
    score_dag,
)
from mhsic.exceptions import InvalidInputError, UnsupportedSizeError
from mhsic.kernels import KernelSpec
from mhsic.testing import TestConfig
from mhsic.validation import MultiSample


# ---------------------------------------------------------------- DAGs

def test_dag_validation():
    with pytest.raises(InvalidInputError):
        Dag(2, ({1}, {0}))
    with pytest.raises(InvalidInputError):
        Dag(2, ({0}, set()))
    with pytest.raises(InvalidInputError):
        Dag(2, (set(),))
    with pytest.raises(InvalidInputError):
        Dag(2, ({5}, set()))
    d = Dag.from_edges(3, [(0, 1), (1, 2)])
    assert d.edges == [(0, 1), (1, 2)]
    assert d.topological_order() == [0, 1, 2]
    assert d.num_edges == 2
    assert str(d) == "Dag(0->1, 1->2)"
    np.testing.assert_array_equal(d.adjacency(), [[0, 1, 0], [0, 0, 1], [0, 0, 0]])


@pytest.mark.parametrize("M,count", [(1, 1), (2, 3), (3, 25), (4, 543)])
def test_enumerate_dags_counts(M, count):
    dags = enumerate_dags(M)
    assert len(dags) == count
    assert len({tuple(d.parents) for d in dags}) == count
    assert dags[0].num_edges == 0


def test_enumerate_dags_two_nodes_by_hand():
    assert [d.edges for d in enumerate_dags(2)] == [[], [(0, 1)], [(1, 0)]]


def test_enumerate_dags_too_large():
    with pytest.raises(UnsupportedSizeError):
        enumerate_dags(5)


def test_enumerate_dags_all_acyclic_and_complete():
    # brute force: on 3 nodes a cycle has length 2 or 3, so a graph is acyclic
    # iff it has no reciprocal pair and trace(A^3) == 0
    pairs = [(i, j) for i in range(3) for j in range(3) if i != j]
    expected = set()
    for mask in range(1 << len(pairs)):
        edges = [p for k, p in enumerate(pairs) if mask >> k & 1]
        A = np.zeros((3, 3), dtype=int)
        for a, b in edges:
            A[a, b] = 1
        if np.trace(np.linalg.matrix_power(A, 3)) == 0 and not any(
            A[a, b] and A[b, a] for a, b in pairs
        ):
            expected.add(tuple(sorted(edges)))
    got = {tuple(d.edges) for d in enumerate_dags(3)}
    assert got == expected


@pytest.mark.parametrize("M", [1, 2, 3, 4, 5])
def test_enumerate_full_dags(M):
    dags = enumerate_full_dags(M)
    assert len(dags) == len(list(itertools.permutations(range(M))))
    assert all(d.num_edges == M * (M - 1) // 2 for d in dags)
    assert len({tuple(d.parents) for d in dags}) == len(dags)


def test_enumerate_full_dags_bounds():
    assert len(enumerate_full_dags(4)) == 24
    assert len(enumerate_full_dags(3)) == 6
    with pytest.raises(UnsupportedSizeError):
        enumerate_full_dags(7)


# ---------------------------------------------------------------- regression residuals

def test_residuals_empty_parents():
    np.testing.assert_array_equal(krr_residuals([1.0, 2.0, 3.0]), [-1.0, 0.0, 1.0])
    np.testing.assert_array_equal(krr_residuals([1.0, 2.0, 3.0], np.zeros((3, 0))), [-1.0, 0.0, 1.0])


def test_residuals_interpolate_smooth_function():
    x = np.linspace(0, 2 * np.pi, 100)
    y = np.sin(x)
    r = krr_residuals(y, x, ridge=1e-4)
    assert np.linalg.norm(r) / np.linalg.norm(y - y.mean()) <= 0.1


def test_residuals_infinite_ridge_limit():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(80)
    y = rng.standard_normal(80) + 3.0
    r = krr_residuals(y, x, ridge=1e6)
    fit = (y - y.mean()) - r
    assert np.linalg.norm(fit) <= 1e-3 * np.linalg.norm(y)


def test_residuals_degenerate_regressor_warns(caplog):
    y = np.array([1.0, 4.0, 2.0, 5.0])
    with caplog.at_level("WARNING"):
        r = krr_residuals(y, np.ones(4))
    np.testing.assert_allclose(r, y - y.mean())
    assert "no spread" in caplog.text


def test_residuals_errors():
    with pytest.raises(InvalidInputError):
        krr_residuals(np.ones((4, 2)), np.arange(4.0))
    with pytest.raises(InvalidInputError):
        krr_residuals(np.arange(4.0), np.arange(5.0))
    with pytest.raises(InvalidInputError):
        krr_residuals(np.arange(4.0), np.arange(4.0), ridge=0.0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), c=st.floats(-100, 100), k=st.integers(0, 3))
def test_residuals_shift_invariant(seed, c, k):
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(40)
    X = rng.standard_normal((40, k)) if k else None
    diff = krr_residuals(y + c, X) - krr_residuals(y, X)
    assert np.ptp(diff) <= 1e-8


def test_kernel_ridge_estimator():
    rng = np.random.default_rng(1)
    x = rng.uniform(-2, 2, (60, 1))
    y = np.tanh(2 * x[:, 0]) + 0.1 * rng.standard_normal(60)
    est = KernelRidgeResiduals().fit(x, y)
    np.testing.assert_allclose(est.residuals_, krr_residuals(y, x), atol=1e-10)
    np.testing.assert_allclose(est.predict(x), y - est.residuals_, atol=1e-10)
    assert est.score(x, y) > 0.9



def test_residuals_additive_matches_joint_for_one_regressor():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((50, 1))
    y = np.sin(x[:, 0]) + 0.3 * rng.standard_normal(50)
    np.testing.assert_allclose(krr_residuals(y, x), krr_residuals(y, x, additive=False), atol=1e-12)


def test_residuals_additive_gram_is_sum_of_univariate_grams():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((30, 2))
    y = rng.standard_normal(30)
    specs = [KernelSpec().resolve(X[:, [j]]) for j in range(2)]
    K = kernel_matrix(X[:, [0]], specs[0].gamma) + kernel_matrix(X[:, [1]], specs[1].gamma)
    yc = y - y.mean()
    expected = yc - K @ np.linalg.solve(K + 30 * 1e-3 * np.eye(30), yc)
    np.testing.assert_allclose(krr_residuals(y, X), expected, atol=1e-10)


def test_residuals_additive_drops_constant_column(caplog):
    rng = np.random.default_rng(4)
    x = rng.standard_normal(40)
    y = np.tanh(x) + 0.1 * rng.standard_normal(40)
    X = np.column_stack([x, np.ones(40)])
    with caplog.at_level("WARNING"):
        r = krr_residuals(y, X)
    np.testing.assert_allclose(r, krr_residuals(y, x), atol=1e-12)
    assert "no spread" in caplog.text


def test_kernel_ridge_estimator_additive_two_regressors():
    rng = np.random.default_rng(5)
    X = rng.uniform(-2, 2, (80, 2))
    y = np.tanh(2 * X[:, 0]) - np.sin(X[:, 1]) + 0.1 * rng.standard_normal(80)
    est = KernelRidgeResiduals().fit(X, y)
    np.testing.assert_allclose(est.residuals_, krr_residuals(y, X), atol=1e-10)
    np.testing.assert_allclose(est.predict(X), y - est.residuals_, atol=1e-10)
    joint = KernelRidgeResiduals(additive=False).fit(X, y)
    np.testing.assert_allclose(joint.residuals_, krr_residuals(y, X, additive=False), atol=1e-10)
    assert est.score(X, y) > 0.9

# ---------------------------------------------------------------- ANM sampling

def test_anm_mechanism_ranges():
    dag = enumerate_full_dags(4)[0]
    mech = anm_mechanisms(dag, 3)
    assert set(mech.edge_params) == set(dag.edges)
    for a, b in mech.edge_params.values():
        assert -2 <= a <= 2 and 0.5 <= b <= 2
    for sd in mech.noise_sd:
        assert 1.0 <= sd**2 <= np.sqrt(2.0)


def test_sample_anm_follows_structure():
    dag = Dag.from_edges(2, [(1, 0)])
    s = sample_anm(dag, 400, seed=2, f_seed=5)
    (a, b), = anm_mechanisms(dag, 5).edge_params.values()
    noise = s[0][:, 0] - a * np.tanh(b * s[1][:, 0])
    assert abs(np.corrcoef(noise, s[1][:, 0])[0, 1]) < 0.15


# ---------------------------------------------------------------- scoring and discovery

def chain_sample(n, seed):
    """0 -> 1 -> 2 with strong monotone mechanisms."""
    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal(n)
    x1 = 2.0 * np.tanh(1.5 * x0) + 0.5 * rng.standard_normal(n)
    x2 = -2.0 * np.tanh(1.0 * x1) + 0.5 * rng.standard_normal(n)
    return MultiSample((x0, x1, x2))


CHAIN = Dag.from_edges(3, [(0, 1), (1, 2)])
MISSING_EDGE = Dag.from_edges(3, [(1, 2)])


def test_score_single_node():
    s = score_dag(MultiSample(([1.0, 2.0, 3.0],)), Dag(1, ((),)))
    assert s.p_value == 1.0


def test_score_dag_size_mismatch():
    with pytest.raises(InvalidInputError):
        score_dag(chain_sample(20, 0), Dag(2, ((), ())))


@pytest.mark.slow
def test_true_chain_accepted_wrong_dag_rejected():
    accepted = rejected = 0
    for t in range(100):
        s = chain_sample(300, t)
        cfg = TestConfig(estimator="vhsic", rng_seed=t)
        accepted += score_dag(s, CHAIN, cfg).p_value > 0.05
        rejected += score_dag(s, MISSING_EDGE, cfg).p_value <= 0.05
    assert accepted >= 80
    assert rejected >= 80


def test_discover_single_candidate():
    ranked = discover(chain_sample(40, 1), [CHAIN], TestConfig(num_permutations=20))
    assert len(ranked) == 1 and ranked[0].dag == CHAIN and ranked[0].index == 0


def test_discover_ordering_and_determinism():
    s = chain_sample(60, 2)
    cfg = TestConfig(num_permutations=30, rng_seed=4)
    a = discover(s, enumerate_dags(3), cfg)
    b = discover(s, enumerate_dags(3), cfg)
    assert [x.to_dict() for x in a] == [x.to_dict() for x in b]
    keys = [(-x.p_value, x.dag.num_edges, x.index) for x in a]
    assert keys == sorted(keys)
    assert all(0 < x.p_value <= 1 for x in a)


def test_discover_ties_prefer_fewer_edges():
    # with one permutation every p-value is 0.5 or 1, so ties are guaranteed
    s = MultiSample((np.arange(10.0), np.arange(10.0)[::-1] ** 2))
    ranked = discover(s, enumerate_dags(2)[::-1], TestConfig(num_permutations=1))
    for x, y in zip(ranked, ranked[1:]):
        if x.p_value == y.p_value:
            assert (x.dag.num_edges, x.index) <= (y.dag.num_edges, y.index)


def test_discover_needs_candidates():
    with pytest.raises(InvalidInputError):
        discover(chain_sample(20, 0), [], TestConfig())


def test_anm_discovery_estimator():
    s = chain_sample(80, 3)
    est = AnmDagDiscovery(num_permutations=30, estimator="vhsic").fit(s.to_array())
    assert len(est.scores_) == 25
    assert est.best_dag_ == est.scores_[0].dag
    est2 = AnmDagDiscovery(candidates="full", num_permutations=10).fit(s)
    assert len(est2.scores_) == 6
