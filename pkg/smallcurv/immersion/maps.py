# Explicit immersions of products of spheres: the S^n x S^1 map, single Veronese maps and
# tensor products weighted by a measure.

import logging
from dataclasses import dataclass, field
from math import sqrt
from typing import Callable, Optional

import numpy as np

from ..copositivity import critical_s
from ..measure import (CurvatureData, ProblemInstance, ambient_dimension, curvature_data,
                       immersion_check, validate)
from ..spectral import SpectralParams, eigen_dimension, lambda_iso, rho
from .harmonics import MAX_EXPLICIT_LEVEL, UnsupportedFactorError, veronese_components

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExplicitImmersion:
    """
    A class representing an explicit map from a product of spheres into R^N.

    :param domain: The product of spheres.
    :type domain: ProblemInstance
    :param ambient_dim: N.
    :type ambient_dim: int
    :param evaluator: Maps a list of per-factor point arrays of shape ``(k, n_m+1)`` to ``(k, N)``.
    :type evaluator: callable
    :param metric_scales: Constants c_m with pullback metric ``sum c_m g_{S^{n_m}}``.
    :type metric_scales: tuple
    :param normal_curvature: The known maximal normal curvature, when available in closed form.
    :type normal_curvature: float, optional
    :param measure: The measure of a tensor map.
    :param label: Short description used in reports.
    """

    domain: ProblemInstance
    ambient_dim: int
    evaluator: Callable = field(repr=False)
    metric_scales: tuple
    normal_curvature: Optional[float] = None
    measure: object = field(default=None, repr=False)
    label: str = ""

    @property
    def dimension(self):
        return self.domain.dimension

    def __call__(self, points):
        """Evaluates the map on one point (list of unit vectors) or a batch of points."""
        arrays = [np.asarray(p, dtype=float) for p in points]
        single = arrays[0].ndim == 1
        if single:
            arrays = [a[None, :] for a in arrays]
        out = self.evaluator(arrays)
        return out[0] if single else out


def _batched_kron(a, b):
    k = a.shape[0]
    return (a[:, :, None] * b[:, None, :]).reshape(k, -1)


def build_sns1(n, r1, r2, tol=1e-12):
    """The map ``(x, t) -> (r1 cos t x, r1 sin t x, r2 cos 2t, r2 sin 2t)`` of S^n x S^1 into R^{2n+4}.

    With ``r1 = sqrt(2/3)`` and ``r2 = sqrt(1/3)`` it is isotropic with normal curvature ``sqrt(3/2)``.

    :param n: Dimension of the sphere factor.
    :type n: int
    :param r1: Radius of the first block.
    :type r1: float
    :param r2: Radius of the second block.
    :type r2: float
    :raises ValueError: If ``r1, r2`` are not positive or ``r1^2 + r2^2 != 1``.
    :rtype: ExplicitImmersion
    """
    if not (r1 > 0 and r2 > 0):
        raise ValueError(f"r1 and r2 must be positive. ({r1}, {r2}) was given.")
    if abs(r1 * r1 + r2 * r2 - 1.0) > tol:
        raise ValueError(f"r1^2 + r2^2 must equal 1. {r1 * r1 + r2 * r2!r} was given.")

    def evaluator(points):
        x, y = points
        c, s = y[:, 0:1], y[:, 1:2]
        return np.hstack([r1 * c * x, r1 * s * x,
                          r2 * (c * c - s * s), r2 * 2.0 * c * s])

    # Same map as the tensor map of r1^2 d(1,1) + r2^2 d(0,2)
    a2 = r1 * r1
    b2 = r2 * r2
    data = CurvatureData(((a2, 3 * a2), (3 * a2, a2 + 16 * b2)), (a2, a2 + 4 * b2))
    c_f = sqrt(float(critical_s(data, mode="numeric").s_star))
    return ExplicitImmersion(ProblemInstance((n, 1)), 2 * n + 4, evaluator, (a2, a2 + 4 * b2),
                             normal_curvature=c_f, label=f"sns1(n={n}, r1={r1:.12g}, r2={r2:.12g})")


def build_sns1_optimal(n):
    """The isotropic S^n x S^1 map with ``r1 = sqrt(2/3)``, ``r2 = sqrt(1/3)``."""
    return build_sns1(n, sqrt(2.0 / 3.0), sqrt(1.0 / 3.0))


def build_veronese(n, l):
    """The normalized Veronese map ``phi_{n,l}`` of S^n as an immersion into R^{D(n,l)}.

    ``l = 0`` is the constant map, ``l = 1`` the inclusion and ``l = 2`` the quadratic Veronese
    map; the pullback metric is ``rho(n,l) g_{S^n}``.

    :raises UnsupportedFactorError: For ``l >= 3``.
    :rtype: ExplicitImmersion
    """
    phi = veronese_components(n, l)
    p = SpectralParams(n, l)
    r = rho(p)
    c_f = sqrt(float(lambda_iso(p))) / float(r) if r > 0 else None

    def evaluator(points):
        return phi(points[0])

    return ExplicitImmersion(ProblemInstance((n,)), eigen_dimension(p), evaluator, (float(r),),
                             normal_curvature=c_f, label=f"veronese(n={n}, l={l})")


def build_tensor(mu):
    """The tensor immersion ``F = sum over atoms of sqrt(alpha) phi_{l_1} (x) ... (x) phi_{l_M}``.

    :param mu: A valid measure whose atoms have every level at most 2.
    :type mu: VeroneseMeasure
    :raises UnsupportedFactorError: Naming the first atom with a level above 2.
    :raises ValueError: If ``mu`` is invalid or the map is not an immersion.
    :rtype: ExplicitImmersion
    """
    ok, message = validate(mu)
    if not ok:
        raise ValueError(f"Invalid measure: {message}.")
    factors = mu.instance.factors
    for atom in mu.atoms:
        for n, l in zip(factors, atom.l_vec):
            if l > MAX_EXPLICIT_LEVEL:
                raise UnsupportedFactorError(
                    f"Atom {atom.l_vec} needs an eigenbasis for l = {l} on S^{n}; only l <= 2 is built.")
    data = curvature_data(mu)
    ok, m = immersion_check(data)
    if not ok:
        raise ValueError(f"G_{m + 1} = 0: the tensor map is not an immersion.")

    blocks = []
    for atom in mu.atoms:
        comps = [veronese_components(n, int(l)) for n, l in zip(factors, atom.l_vec)]
        blocks.append((sqrt(float(atom.weight)), comps))

    def evaluator(points):
        parts = []
        for weight, comps in blocks:
            value = comps[0](points[0])
            for comp, x in zip(comps[1:], points[1:]):
                value = _batched_kron(value, comp(x))
            parts.append(weight * value)
        return np.hstack(parts)

    certificate = critical_s(data, mode="exact")
    return ExplicitImmersion(mu.instance, ambient_dimension(mu), evaluator,
                             tuple(float(g) for g in data.G),
                             normal_curvature=sqrt(float(certificate.s_star)), measure=mu,
                             label=f"tensor({mu.name or mu.instance.key})")
