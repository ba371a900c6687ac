"""Unbiased (U-statistic) squared HSIC.

The squared HSIC of ``M`` components splits into three expectations of
products of kernel values:

* joint term: two joint observations, ``k_m(x_m^i, x_m^j)`` for all ``m``;
* marginal term: ``2M`` observations, ``k_m(x_m^{i_m}, x_m^{j_m})``;
* cross term: one joint observation ``i`` against ``M`` others,
  ``k_m(x_m^i, x_m^{j_m})``.

Each is estimated by averaging over ordered tuples of *distinct* indices.
Sums over distinct tuples are obtained from unrestricted sums by Moebius
inversion on the lattice of set partitions of the tuple's labels:

    sum_{injective f} F(f) = sum_pi mu(pi) * sum_{f constant on blocks of pi} F(f),
    mu(pi) = prod_blocks (-1)^(|B|-1) (|B|-1)!

and every unrestricted sum is a small tensor contraction of Gram matrices.
For ``M = 2`` the contractions collapse to the familiar closed form in
``O(n^2)``.
"""

from __future__ import annotations

import math
import string
from typing import Iterator

import numpy as np

from ..exceptions import InvalidInputError
from ..kernels import gram, resolve_specs
from ..validation import check_multisample


def set_partitions(items: list) -> Iterator[list]:
    """All set partitions of ``items`` as lists of blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _falling(n: int, k: int) -> float:
    return float(math.prod(range(n - k + 1, n + 1)))


def _contract(factors: list) -> float:
    """Unrestricted sum over block values of a product of Gram entries.

    ``factors`` holds ``(K, a, b)`` meaning ``K[v_a, v_b]``; a factor with
    ``a == b`` reads the diagonal.
    """
    letters = string.ascii_letters
    operands = []
    subs = []
    for K, a, b in factors:
        if a == b:
            operands.append(np.diagonal(K))
            subs.append(letters[a])
        else:
            operands.append(K)
            subs.append(letters[a] + letters[b])
    # sum out letters that occur in a single operand before contracting
    counts = {}
    for s in subs:
        for ch in s:
            counts[ch] = counts.get(ch, 0) + 1
    for i, s in enumerate(subs):
        lonely = [ch for ch in s if counts[ch] == 1]
        if lonely and len(s) == 2:
            axis = s.index(lonely[0])
            operands[i] = operands[i].sum(axis=axis)
            subs[i] = s.replace(lonely[0], "")
            counts[lonely[0]] = 0
    expr = ",".join(subs) + "->"
    return float(np.einsum(expr, *operands, optimize="greedy"))


def distinct_tuple_sum(n_labels: int, factors: list, n: int) -> float:
    """Sum of ``prod K[f(a), f(b)]`` over injective maps ``f: labels -> range(n)``."""
    total = 0.0
    for partition in set_partitions(list(range(n_labels))):
        block_of = {}
        mu = 1
        for bi, block in enumerate(partition):
            size = len(block)
            mu *= (-1) ** (size - 1) * math.factorial(size - 1)
            for lab in block:
                block_of[lab] = bi
        remapped = [(K, block_of[a], block_of[b]) for K, a, b in factors]
        # blocks not touched by any factor contribute a factor n each
        touched = {x for _, a, b in remapped for x in (a, b)}
        spare = len(partition) - len(touched)
        total += mu * _contract(remapped) * float(n) ** spare
    return total


def _general_terms(grams: list, n: int) -> tuple:
    M = len(grams)
    joint = distinct_tuple_sum(2, [(K, 0, 1) for K in grams], n)
    # labels 0..M-1 are i_m, M..2M-1 are j_m
    marginal = distinct_tuple_sum(2 * M, [(K, m, M + m) for m, K in enumerate(grams)], n)
    # label 0 is the joint observation, 1..M the per-component partners
    cross = distinct_tuple_sum(M + 1, [(K, 0, m + 1) for m, K in enumerate(grams)], n)
    return (
        joint / _falling(n, 2),
        marginal / _falling(n, 2 * M),
        cross / _falling(n, M + 1),
    )


def _pair_terms(K: np.ndarray, L: np.ndarray) -> tuple:
    """Closed-form joint, marginal and cross averages for two components."""
    n = K.shape[0]
    Kt = K - np.diag(np.diag(K))
    Lt = L - np.diag(np.diag(L))
    kr = Kt.sum(axis=1)
    lr = Lt.sum(axis=1)
    sk = kr.sum()
    sl = lr.sum()
    kl = float(np.sum(Kt * Lt))  # sum over i != j of K_ij L_ij
    krl = float(kr @ lr)  # sum over i, j != i, q != i of K_ij L_iq
    # distinct triples (i, j, q): remove j == q
    cross = krl - kl
    # distinct quadruples (i, j, q, r) of K_ij L_qr, by inclusion-exclusion
    marginal = sk * sl - 4.0 * krl + 2.0 * kl
    return (
        kl / _falling(n, 2),
        marginal / _falling(n, 4),
        cross / _falling(n, 3),
    )


def u_hsic_terms(sample, specs=None, method: str = "auto") -> tuple:
    """U-statistic estimates of the joint, marginal and cross terms.

    ``method="partition"`` forces the general expansion even for ``M = 2``.
    """
    if method not in ("auto", "partition"):
        raise InvalidInputError(f"unknown method {method!r}")
    sample = check_multisample(sample, min_components=2)
    n, M = sample.n, sample.M
    if n < 2 * M:
        raise InvalidInputError(f"U-statistic needs n >= 2M = {2 * M}, got n={n}")
    specs = resolve_specs(specs, sample)
    grams = [gram(s, x) for s, x in zip(specs, sample)]
    if M == 2 and method == "auto":
        return _pair_terms(*grams)
    return _general_terms(grams, n)


def u_hsic(sample, specs=None, method: str = "auto") -> float:
    """Unbiased estimate of squared HSIC; may be negative.

    Requires ``n >= 2M``. ``M = 2`` runs in ``O(n^2)``; larger ``M`` goes
    through the partition expansion and is meant for modest ``n``.
    """
    joint, marginal, cross = u_hsic_terms(sample, specs, method)
    return float(joint + marginal - 2.0 * cross)


def u_hsic_from_grams(grams) -> float:
    """Unbiased squared HSIC from full Gram matrices."""
    grams = list(grams)
    n, M = grams[0].shape[0], len(grams)
    if M < 2:
        raise InvalidInputError("need at least two Gram matrices")
    if n < 2 * M:
        raise InvalidInputError(f"U-statistic needs n >= 2M = {2 * M}, got n={n}")
    terms = _pair_terms(*grams) if M == 2 else _general_terms(grams, n)
    return float(terms[0] + terms[1] - 2.0 * terms[2])
