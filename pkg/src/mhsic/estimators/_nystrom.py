"""Nystrom estimators: the M-component estimator and the two-component baseline."""

from __future__ import annotations

import logging
import math

import numpy as np

from ..exceptions import InvalidInputError
from ..kernels import gram, resolve_specs
from ..linalg import eigh_psd, hadamard, quad_form
from ..rng import make_rng
from ..validation import check_multisample
from ._types import HsicValue, NystromPlan

logger = logging.getLogger(__name__)


def nystrom_size(schedule, n: int) -> int:
    """Number of landmarks for sample size ``n``.

    ``schedule`` is an int, a callable of ``n``, or a string: a literal
    integer or ``"<c>sqrt"`` meaning ``ceil(c * sqrt(n))``. The result is
    clipped to ``[1, n]``.
    """
    if callable(schedule):
        size = int(schedule(n))
    elif isinstance(schedule, (int, np.integer)):
        size = int(schedule)
    elif isinstance(schedule, str):
        text = schedule.strip()
        if text.endswith("sqrt"):
            coef = text[: -len("sqrt")] or "1"
            try:
                c = float(coef)
            except ValueError as exc:
                raise InvalidInputError(f"bad Nystrom schedule {schedule!r}") from exc
            if not c > 0:
                raise InvalidInputError(f"bad Nystrom schedule {schedule!r}")
            size = math.ceil(c * math.sqrt(n))
        else:
            try:
                size = int(text)
            except ValueError as exc:
                raise InvalidInputError(f"bad Nystrom schedule {schedule!r}") from exc
    else:
        raise InvalidInputError(f"bad Nystrom schedule {schedule!r}")
    if size < 1:
        raise InvalidInputError(f"Nystrom size must be positive, got {size}")
    return min(size, n)


def draw_landmarks(n: int, n_prime: int, seed: int) -> np.ndarray:
    """``n_prime`` row indices drawn uniformly with replacement."""
    n_prime = int(n_prime)
    if not 1 <= n_prime <= n:
        raise InvalidInputError(f"need 1 <= n_prime <= n={n}, got {n_prime}")
    return make_rng(seed).integers(0, n, size=n_prime)


def nystrom_weights(K_sub, K_cross, rel_tol: float | None = None) -> np.ndarray:
    """Minimum-norm weights of the Nystrom mean embedding.

    Returns ``pinv(K_sub) @ K_cross @ 1 / n`` where ``K_sub`` is the
    ``n' x n'`` landmark Gram matrix and ``K_cross`` the ``n' x n`` Gram
    matrix between landmarks and the full sample.
    """
    K_cross = np.asarray(K_cross, dtype=float)
    K_sub = np.asarray(K_sub, dtype=float)
    if K_cross.ndim != 2 or K_sub.shape != (K_cross.shape[0], K_cross.shape[0]):
        raise InvalidInputError(
            f"shape mismatch: K_sub {K_sub.shape}, K_cross {K_cross.shape}"
        )
    return _weights(K_sub, K_cross.sum(axis=1) / K_cross.shape[1], rel_tol)[0]


def _weights(K_sub, mean_col, rel_tol):
    vals, vecs, dropped = eigh_psd(K_sub, rel_tol)
    return vecs @ ((vecs.T @ mean_col) / vals), dropped


def build_plan(
    sample,
    specs=None,
    n_prime=None,
    seed: int = 0,
    indices=None,
    rel_tol: float | None = None,
) -> NystromPlan:
    """Draw landmarks and solve for the joint and marginal embedding weights.

    Landmark rows are drawn uniformly with replacement from the joint
    sample with a Philox stream keyed by ``seed``; every component uses
    the same rows. Passing ``indices`` skips the draw. The joint weights use
    the Hadamard products of the per-component landmark Gram matrices,
    which are the Gram matrices of the product kernel.
    """
    sample = check_multisample(sample)
    specs = resolve_specs(specs, sample)
    n, M = sample.n, sample.M
    if indices is None:
        if n_prime is None:
            raise InvalidInputError("give n_prime or indices")
        indices = draw_landmarks(n, n_prime, seed)
        plan_seed = int(seed)
    else:
        indices = np.asarray(indices, dtype=np.intp)
        plan_seed = None
    subs, means = [], []
    joint_sub = joint_cross = None
    for spec, x in zip(specs, sample):
        landmarks = x[indices]
        K_sub = gram(spec, landmarks)
        K_cross = gram(spec, landmarks, x)
        subs.append(K_sub)
        means.append(K_cross.mean(axis=1))
        if joint_sub is None:
            joint_sub, joint_cross = K_sub.copy(), K_cross
        else:
            joint_sub *= K_sub
            joint_cross *= K_cross
    alpha_joint, dropped = _weights(joint_sub, joint_cross.mean(axis=1), rel_tol)
    alphas = []
    for K_sub, mean_col in zip(subs, means):
        a, d = _weights(K_sub, mean_col, rel_tol)
        alphas.append(a)
        dropped += d
    return NystromPlan(
        indices, alpha_joint, tuple(alphas), n, M, plan_seed, rank_deficient=dropped > 0
    )


def _check_plan(sample, plan: NystromPlan):
    if plan.n != sample.n or plan.M != sample.M:
        raise InvalidInputError(
            f"plan built for n={plan.n}, M={plan.M}; sample has n={sample.n}, M={sample.M}"
        )


def n_mhsic_terms(sample, specs, plan: NystromPlan) -> tuple:
    """The three RKHS inner products making up the Nystrom estimate.

    ``A = ||mu_joint||^2``, ``B = ||prod_m mu_m||^2`` and
    ``C = <mu_joint, prod_m mu_m>``, each with the Nystrom embeddings, so
    that the squared statistic is ``A + B - 2C``.
    """
    sample = check_multisample(sample, min_components=2)
    _check_plan(sample, plan)
    specs = resolve_specs(specs, sample)
    subs = [gram(spec, x[plan.indices]) for spec, x in zip(specs, sample)]
    a_joint = plan.alpha_joint
    A = quad_form(a_joint, hadamard(subs), a_joint)
    B = 1.0
    cross = np.ones(plan.n_prime)
    for K, a in zip(subs, plan.alpha_marginals):
        Ka = K @ a
        B *= float(a @ Ka)
        cross *= Ka
    C = float(a_joint @ cross)
    return A, B, C


def n_mhsic(sample, specs, plan: NystromPlan) -> HsicValue:
    """Nystrom estimate of squared joint HSIC for ``M >= 2`` components.

    Costs ``O(M n'^2)`` given the plan; building the plan is
    ``O(M n'^3 + M n' n)``.
    """
    A, B, C = n_mhsic_terms(sample, specs, plan)
    return HsicValue(A + B - 2.0 * C, rank_deficient=plan.rank_deficient)


def n_hsic0(
    sample,
    specs=None,
    plan: NystromPlan | None = None,
    *,
    indices=None,
    form: str = "feature",
    rel_tol: float | None = None,
) -> HsicValue:
    """Two-component Nystrom baseline built on low-rank Gram approximations.

    Each Gram matrix is replaced by ``K_nn' K_n'n'^- K_n'n``. With
    ``form="feature"`` the statistic is ``||(H phi_1)^T H phi_2||_F^2 / n^2``
    for the features ``phi_m = K_nn' K_n'n'^{-1/2}`` (cost ``O(n'^3 + n n'^2)``);
    ``form="expanded"`` materialises the ``n x n`` approximations and
    evaluates the three-term V-statistic formula instead, which is only
    useful as a cross-check. Landmarks come from ``plan.indices`` or
    ``indices``. Singular landmark directions are dropped, and the result
    is then flagged ``rank_deficient``.
    """
    sample = check_multisample(sample)
    if sample.M != 2:
        raise InvalidInputError(f"this baseline needs exactly 2 components, got {sample.M}")
    if plan is not None:
        _check_plan(sample, plan)
        indices = plan.indices
    if indices is None:
        raise InvalidInputError("give a plan or landmark indices")
    indices = np.asarray(indices, dtype=np.intp)
    specs = resolve_specs(specs, sample)
    n = sample.n
    dropped = 0
    if form == "feature":
        feats = []
        for spec, x in zip(specs, sample):
            landmarks = x[indices]
            vals, vecs, d = eigh_psd(gram(spec, landmarks), rel_tol)
            dropped += d
            # K_nn' V diag(lambda^-1/2): the features up to an orthogonal
            # rotation, which leaves the Frobenius norm unchanged
            phi = gram(spec, x, landmarks) @ (vecs / np.sqrt(vals))
            feats.append(phi - phi.mean(axis=0))
        S = feats[0].T @ feats[1]
        squared = float(np.sum(S * S)) / (n * n)
    elif form == "expanded":
        approx = []
        for spec, x in zip(specs, sample):
            landmarks = x[indices]
            vals, vecs, d = eigh_psd(gram(spec, landmarks), rel_tol)
            dropped += d
            # K_nm V diag(1/lambda) V^T K_mn without forming the pseudoinverse
            W = gram(spec, x, landmarks) @ vecs
            approx.append((W / vals) @ W.T)
        K1, K2 = approx
        r1, r2 = K1.sum(axis=1), K2.sum(axis=1)
        squared = float(
            np.sum(K1 * K2) / n**2
            + (r1.sum() / n**2) * (r2.sum() / n**2)
            - 2.0 * np.sum(r1 * r2) / n**3
        )
    else:
        raise InvalidInputError(f"unknown form {form!r}")
    if dropped:
        logger.debug("n_hsic0 dropped %d singular landmark directions", dropped)
    return HsicValue(squared, rank_deficient=dropped > 0)
