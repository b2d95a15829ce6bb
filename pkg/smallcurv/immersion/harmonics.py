# Explicit eigenbases of the Laplacian on S^n for l <= 2.
#
# The degree-2 basis starts from {x_i x_j (i < j), x_i^2 - x_{i+1}^2} and is orthogonalized
# exactly in the mean-square inner product of the sphere using rational monomial moments.

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import prod, sqrt

import numpy as np

from ..spectral import SpectralParams, eigen_dimension


class UnsupportedFactorError(ValueError):
    """Raised when an explicit eigenbasis for a factor is not available."""


MAX_EXPLICIT_LEVEL = 2


def _double_factorial_odd(k):
    # (k-1)!! for even k: 1 * 3 * ... * (k-1)
    return prod(range(1, k, 2))


def monomial_sphere_moment(exponents):
    """Returns the exact mean of ``prod x_i^{e_i}`` over the unit sphere in R^d, ``d = len(exponents)``.

    Odd exponents give 0. Otherwise the mean is
    ``prod (e_i - 1)!! / (d (d + 2) ... (d + |e| - 2))``.
    """
    if any(e % 2 for e in exponents):
        return Fraction(0)
    d = len(exponents)
    total = sum(exponents)
    numerator = prod(_double_factorial_odd(e) for e in exponents)
    denominator = prod(d + 2 * k for k in range(total // 2))
    return Fraction(numerator, denominator)


def _quadratic_mean_product(P, Q):
    # Mean of (x^T P x)(x^T Q x) over S^{d-1}, expanded into monomials
    d = len(P)
    total = Fraction(0)
    for i, j, k, l in product(range(d), repeat=4):
        c = P[i][j] * Q[k][l]
        if c == 0:
            continue
        e = [0] * d
        for idx in (i, j, k, l):
            e[idx] += 1
        total += c * monomial_sphere_moment(e)
    return total


def _starting_quadratics(n):
    d = n + 1
    basis = []
    for i in range(d):
        for j in range(i + 1, d):
            P = [[Fraction(0)] * d for _ in range(d)]
            P[i][j] = P[j][i] = Fraction(1, 2)
            basis.append(P)
    for i in range(d - 1):
        P = [[Fraction(0)] * d for _ in range(d)]
        P[i][i] = Fraction(1)
        P[i + 1][i + 1] = Fraction(-1)
        basis.append(P)
    return basis


@lru_cache(maxsize=None)
def orthogonal_quadratic_basis(n):
    """Exact Gram-Schmidt of the starting degree-2 harmonics on S^n.

    :return: ``(matrices, norms2)``: pairwise orthogonal symmetric matrices ``P_k`` (the
        polynomials ``x^T P_k x``) and their exact mean squares.
    :rtype: tuple
    """
    ortho, norms2 = [], []
    for P in _starting_quadratics(n):
        Q = [row[:] for row in P]
        for R, r2 in zip(ortho, norms2):
            c = _quadratic_mean_product(P, R) / r2
            Q = [[q - c * r for q, r in zip(qrow, rrow)] for qrow, rrow in zip(Q, R)]
        ortho.append(Q)
        norms2.append(_quadratic_mean_product(Q, Q))
    return tuple(tuple(map(tuple, Q)) for Q in ortho), tuple(norms2)


@lru_cache(maxsize=None)
def _quadratic_tensor(n):
    # Float tensor T[k] with phi_k(x) = x^T T[k] x and sum_k phi_k^2 = 1 on the sphere
    matrices, norms2 = orthogonal_quadratic_basis(n)
    D = eigen_dimension(SpectralParams(n, 2))
    return np.array([[[float(x) for x in row] for row in P] for P in matrices]) / np.sqrt(
        np.array([float(r2) for r2 in norms2]) * D)[:, None, None]


def veronese_components(n, l):
    """Returns the normalized Veronese map ``phi_{n,l}`` as a vectorized callable.

    The callable maps points of shape ``(..., n+1)`` on the unit sphere to ``(..., D(n,l))`` with
    ``|phi| = 1``.

    :raises UnsupportedFactorError: For ``l >= 3``.
    """
    if l > MAX_EXPLICIT_LEVEL:
        raise UnsupportedFactorError(f"No explicit eigenbasis for l = {l} on S^{n}; only l <= 2 is built.")
    if l == 0:
        return lambda x: np.ones(np.shape(x)[:-1] + (1,))
    if l == 1:
        return lambda x: np.asarray(x, dtype=float)
    T = _quadratic_tensor(n)
    return lambda x: np.einsum("...a,kab,...b->...k", x, T, x)


def harmonic_check(n):
    """Largest deviation of the l = 2 basis from orthonormality, evaluated exactly.

    Returns 0 for a correct basis: ``<h_i, h_j> = delta_ij`` in the mean-square inner product
    after scaling by the exact norms.
    """
    matrices, norms2 = orthogonal_quadratic_basis(n)
    worst = 0.0
    for a, (P, p2) in enumerate(zip(matrices, norms2)):
        for b, (Q, q2) in enumerate(zip(matrices, norms2)):
            gram = _quadratic_mean_product(P, Q)
            target = p2 if a == b else 0
            worst = max(worst, abs(float(gram - target)) / sqrt(float(p2 * q2)))
    return worst
