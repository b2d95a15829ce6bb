# Random sampling of base points and tangent directions, curvature statistics and the
# closed-form |A(u,u)|^2 of tensor immersions.

import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..config import FD_STEP
from ..measure import curvature_data, parse_rational
from .frames import canonical_directions, first_derivatives, frame_point, second_derivatives

log = logging.getLogger(__name__)


def random_base_point(factors, rng):
    """Uniform random point of the product: normalized Gaussian vectors per factor."""
    out = []
    for n in factors:
        v = rng.standard_normal(n + 1)
        out.append(v / np.linalg.norm(v))
    return out


def random_unit_coefficients(n, rng):
    """Uniform random unit vector of R^n (frame coefficients of a pullback-unit tangent vector)."""
    z = rng.standard_normal(n)
    return z / np.linalg.norm(z)


def round_norms2(velocity, factors):
    """``U_m = |u_m|^2`` in the round metric of each factor for a domain tangent vector."""
    out, start = [], 0
    for n in factors:
        v = velocity[start:start + n + 1]
        out.append(float(v @ v))
        start += n + 1
    return np.array(out)


def closed_form_sff_norm2(mu, U):
    """Exact ``|A(u,u)|^2 = sum E[lambda_m] U_m^2 + 6 sum_{a<b} E[rho_a rho_b] U_a U_b``.

    :param mu: A valid measure.
    :type mu: VeroneseMeasure
    :param U: Nonnegative round norms ``U_m = |u_m|^2`` (rationals for an exact result).
    :type U: sequence
    :rtype: fractions.Fraction or float
    """
    data = curvature_data(mu)
    if len(U) != data.M:
        raise ValueError(f"U has {len(U)} entries for {data.M} factors.")
    exact = all(isinstance(u, (int, Fraction, str)) for u in U)
    if exact:
        U = [parse_rational(u, "U") for u in U]
        zero = Fraction(0)
    else:
        U = [float(u) for u in U]
        zero = 0.0
    if any(u < 0 for u in U):
        raise ValueError("U must be nonnegative.")
    total = zero
    for a in range(data.M):
        for b in range(data.M):
            total += data.A[a][b] * U[a] * U[b]
    return total


@dataclass(frozen=True)
class CurvatureEstimate:
    """Statistics of ``|A(u,u)|`` over random unit tangent vectors."""

    max: float
    min: float
    mean: float
    stddev: float
    samples: int
    seed: int

    def to_dict(self):
        return {"max": self.max, "min": self.min, "mean": self.mean, "stddev": self.stddev,
                "samples": self.samples, "seed": self.seed}


def sample_sff_norms(F, samples, seed, h=FD_STEP):
    """Returns ``(norms, records)`` of ``|A(u,u)|`` at seeded random ``(x, u)``.

    Sample ``k`` draws from ``default_rng([seed, k])``; each record holds the base point, the
    domain velocity and the normal vector.
    """
    factors = F.domain.factors
    norms = np.empty(samples)
    records = []
    for k in range(samples):
        rng = np.random.default_rng([seed, k])
        base = random_base_point(factors, rng)
        directions = canonical_directions(base, F.metric_scales)
        frame = first_derivatives(F, base, directions, h)
        basis, _ = np.linalg.qr(frame.T)
        coeffs = random_unit_coefficients(directions.shape[0], rng)
        velocity = coeffs @ directions
        raw = second_derivatives(F, base, velocity, h)[0]
        normal = raw - basis @ (basis.T @ raw)
        norms[k] = np.linalg.norm(normal)
        records.append((base, velocity, normal))
    return norms, records


def estimate_normal_curvature(F, samples=1000, seed=0, h=FD_STEP):
    """Estimates ``sup |A(u,u)|`` by sampling.

    Base points are uniform on the product and directions uniform on the pullback unit sphere.
    Deterministic given ``seed``.

    :param F: The immersion.
    :type F: ExplicitImmersion
    :param samples: Number of random ``(x, u)`` pairs.
    :type samples: int
    :param seed: Seed of the per-sample streams.
    :type seed: int
    :rtype: CurvatureEstimate
    """
    if samples < 1:
        raise ValueError(f"samples must be positive. {samples} was given.")
    norms, _ = sample_sff_norms(F, samples, seed, h)
    log.debug("Sampled %d curvatures of %s", samples, F.label)
    return CurvatureEstimate(float(norms.max()), float(norms.min()), float(np.mean(norms)),
                             float(np.std(norms)), samples, seed)


def measure_pullback_metric(F, base, h=FD_STEP):
    """Gram matrix of ``dF`` on a factor-aligned round-orthonormal tangent basis at ``base``.

    For a map with metric scales ``c_m`` the result is block diagonal with blocks ``c_m I``.
    """
    base = [np.asarray(p, dtype=float) for p in base]
    round_dirs = canonical_directions(base, [1.0] * len(base))
    d = first_derivatives(F, base, round_dirs, h)
    return d @ d.T


def expected_pullback_metric(F):
    """Block-diagonal matrix with blocks ``c_m I_{n_m}``."""
    return np.diag(np.concatenate([np.full(n, c) for n, c in zip(F.domain.factors, F.metric_scales)]))


def sample_frame_points(F, count, seed, h=FD_STEP):
    """Factor-aligned frame points at ``count`` seeded random base points."""
    points = []
    for k in range(count):
        rng = np.random.default_rng([seed, k])
        points.append(frame_point(F, random_base_point(F.domain.factors, rng), h=h))
    return points
