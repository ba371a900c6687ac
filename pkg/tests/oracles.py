"""Slow reference implementations used only as test oracles.

Each one is a literal sum over index tuples, independent of the
matrix-vector evaluation order used by the library.
"""

import itertools

import numpy as np


def kernel_matrix(x, gamma):
    """Gaussian Gram matrix by an explicit double loop."""
    x = np.asarray(x, dtype=float).reshape(len(x), -1)
    n = x.shape[0]
    K = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            K[i, j] = np.exp(-gamma * np.sum((x[i] - x[j]) ** 2))
    return K


def brute_v_hsic(grams):
    """Squared V-statistic HSIC by summing every index tuple."""
    M = len(grams)
    n = grams[0].shape[0]
    joint = sum(np.prod([K[i, j] for K in grams]) for i in range(n) for j in range(n)) / n**2
    marg = 1.0
    for K in grams:
        marg *= sum(K[i, j] for i in range(n) for j in range(n)) / n**2
    cross = 0.0
    for i in range(n):
        for js in itertools.product(range(n), repeat=M):
            cross += np.prod([K[i, j] for K, j in zip(grams, js)])
    cross /= n ** (M + 1)
    return joint + marg - 2.0 * cross


def brute_u_hsic(grams):
    """Squared U-statistic HSIC by enumerating ordered tuples of distinct indices."""
    M = len(grams)
    n = grams[0].shape[0]

    def mean_over(k, core):
        tuples = list(itertools.permutations(range(n), k))
        return sum(core(t) for t in tuples) / len(tuples)

    A = mean_over(2, lambda t: np.prod([K[t[0], t[1]] for K in grams]))
    B = mean_over(2 * M, lambda t: np.prod([K[t[2 * m], t[2 * m + 1]] for m, K in enumerate(grams)]))
    C = mean_over(M + 1, lambda t: np.prod([K[t[0], t[m + 1]] for m, K in enumerate(grams)]))
    return A + B - 2.0 * C


def discrete_population_hsic2(atoms, probs, gammas):
    """Exact squared HSIC of a finitely supported two-component distribution.

    ``atoms`` is a list of ``(x1, x2)`` pairs with probabilities ``probs``.
    """
    atoms = [(float(a), float(b)) for a, b in atoms]
    p = np.asarray(probs, dtype=float)
    g1, g2 = gammas
    k1 = np.array([[np.exp(-g1 * (a[0] - b[0]) ** 2) for b in atoms] for a in atoms])
    k2 = np.array([[np.exp(-g2 * (a[1] - b[1]) ** 2) for b in atoms] for a in atoms])
    A = p @ (k1 * k2) @ p
    B = (p @ k1 @ p) * (p @ k2 @ p)
    C = p @ ((k1 @ p) * (k2 @ p))
    return float(A + B - 2.0 * C)
