# Spectral constants of round spheres: dimension of the l-th Laplace eigenspace of S^n
# and the scalars rho, lambda of the associated Veronese immersion.

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb


@dataclass(frozen=True)
class SpectralParams:
    """
    A class representing one eigenspace of the Laplacian on the round sphere S^n.

    :param n: Sphere dimension (n >= 1).
    :type n: int
    :param l: Eigenvalue index (l >= 0).
    :type l: int
    """

    n: int
    l: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"Sphere dimension must be a positive integer. {self.n!r} was given.")
        if isinstance(self.l, bool) or not isinstance(self.l, int) or self.l < 0:
            raise ValueError(f"Eigenvalue index must be a nonnegative integer. {self.l!r} was given.")


def _binomial(a, b):
    # C(a, b) with the convention C(a, b) = 0 for a < 0 or b < 0
    if a < 0 or b < 0:
        return 0
    return comb(a, b)


@lru_cache(maxsize=None)
def _eigen_dimension(n, l):
    return _binomial(n + l - 1, n - 1) + _binomial(n + l - 2, n - 1)


@lru_cache(maxsize=None)
def _rho(n, l):
    return Fraction(l * (l + n - 1), n)


@lru_cache(maxsize=None)
def _lambda(n, l):
    r = _rho(n, l)
    return Fraction(3 * n, n + 2) * r * r - Fraction(2 * (n - 1), n + 2) * r


def eigen_dimension(p):
    """Returns D(n, l), the dimension of the l-th eigenspace of the Laplacian on S^n.

    ``D(n, l) = C(n+l-1, n-1) + C(n+l-2, n-1)``; ``D(n, 0) = 1``.

    :param p: The sphere dimension and eigenvalue index.
    :type p: SpectralParams
    :rtype: int
    """
    return _eigen_dimension(p.n, p.l)


def rho(p):
    """Returns the exact pullback-metric scale ``rho(n, l) = l(l+n-1)/n`` of the Veronese map."""
    return _rho(p.n, p.l)


def lambda_iso(p):
    """Returns the exact isotropy constant ``|A(u,u)|^2 / |u|^4`` of the Veronese map.

    ``lambda(n, l) = 3n/(n+2) rho^2 - 2(n-1)/(n+2) rho``.
    """
    return _lambda(p.n, p.l)


def spectral_triple(n, l):
    """Returns ``(D, rho, lambda)`` for S^n and eigenvalue index l."""
    p = SpectralParams(n, l)
    return eigen_dimension(p), rho(p), lambda_iso(p)
