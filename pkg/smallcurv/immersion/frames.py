# Frames, tangent/normal splitting and finite-difference second fundamental forms.
#
# Curves are products of great circles traversed at constant speed, which are geodesics of
# every pullback metric sum c_m g_{S^{n_m}}. The second derivative of F along such a curve is
# therefore A(u, u) plus a tangential part that projection removes.

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import null_space
from scipy.stats import ortho_group

from ..config import DEFAULT_TOLERANCES, FD_STEP

log = logging.getLogger(__name__)

MIN_FD_STEP = 1e-8


@dataclass(frozen=True)
class FramePoint:
    """
    A class representing a point of an immersion with a pullback-orthonormal frame.

    :param base: Per-factor unit vectors of the base point.
    :param position: ``x = F(base)`` in R^N.
    :param directions: Domain tangent vectors ``t_i`` (rows, concatenated over factors) with
        ``dF(t_i) = e_i``.
    :param frame: The ambient frame vectors ``e_i`` (rows).
    :param basis: Orthonormal basis (columns) of the tangent space in R^N.
    """

    base: tuple = field(repr=False)
    position: np.ndarray = field(repr=False)
    directions: np.ndarray = field(repr=False)
    frame: np.ndarray = field(repr=False)
    basis: np.ndarray = field(repr=False)

    @property
    def n(self):
        return self.frame.shape[0]

    @property
    def x_tan(self):
        return self.basis @ (self.basis.T @ self.position)

    @property
    def x_perp(self):
        return self.position - self.x_tan

    def normal_part(self, v):
        return v - self.basis @ (self.basis.T @ v)

    @property
    def orthonormality_error(self):
        return float(np.abs(self.frame @ self.frame.T - np.eye(self.n)).max())


@dataclass(frozen=True)
class SffSample:
    """
    A class representing the second fundamental form table ``A(e_i, e_j)`` at a frame point.

    :param point: The frame point.
    :type point: FramePoint
    :param table: Array of shape ``(n, n, N)``.
    :type table: numpy.ndarray
    """

    point: FramePoint
    table: np.ndarray = field(repr=False)

    @property
    def n(self):
        return self.table.shape[0]

    @property
    def mean_curvature(self):
        return np.einsum("iik->k", self.table)

    def A(self, i, j):
        return self.table[i, j]


def _split(vector, factors):
    out, start = [], 0
    for n in factors:
        out.append(vector[start:start + n + 1])
        start += n + 1
    return out


def geodesic_points(base, velocity, ts, factors):
    """Points ``gamma(t)`` of the product of great circles with ``gamma(0) = base``, ``gamma'(0) = velocity``.

    :return: Per-factor arrays of shape ``(len(ts), n_m + 1)``.
    """
    ts = np.asarray(ts, dtype=float)
    out = []
    for p, v in zip(base, _split(velocity, factors)):
        speed = np.linalg.norm(v)
        if speed == 0.0:
            out.append(np.tile(p, (len(ts), 1)))
            continue
        w = v / speed
        out.append(np.cos(speed * ts)[:, None] * p[None, :] + np.sin(speed * ts)[:, None] * w[None, :])
    return out


def _check_step(h):
    if not h >= MIN_FD_STEP:
        raise ValueError(f"Finite-difference step {h!r} is below {MIN_FD_STEP}.")


def first_derivatives(F, base, velocities, h=FD_STEP):
    """Richardson-extrapolated central first derivatives of F along geodesics, one row per velocity."""
    _check_step(h)
    velocities = np.atleast_2d(velocities)
    ts = np.array([h, -h, h / 2, -h / 2])
    factors = F.domain.factors
    batches = [geodesic_points(base, v, ts, factors) for v in velocities]
    points = [np.vstack([b[m] for b in batches]) for m in range(len(factors))]
    values = F.evaluator(points).reshape(len(velocities), 4, -1)
    d_h = (values[:, 0] - values[:, 1]) / (2 * h)
    d_h2 = (values[:, 2] - values[:, 3]) / h
    return d_h2 + (d_h2 - d_h) / 3.0


def second_derivatives(F, base, velocities, h=FD_STEP):
    """Richardson-extrapolated central second derivatives of F along geodesics.

    ``D(h) = (F(h) - 2F(0) + F(-h)) / h^2`` and the result is ``D(h/2) + (D(h/2) - D(h)) / 3``.
    """
    _check_step(h)
    velocities = np.atleast_2d(velocities)
    ts = np.array([h, -h, h / 2, -h / 2])
    factors = F.domain.factors
    batches = [geodesic_points(base, v, ts, factors) for v in velocities]
    points = [np.vstack([b[m] for b in batches] + [base[m][None, :]]) for m in range(len(factors))]
    values = F.evaluator(points)
    center = values[-1]
    values = values[:-1].reshape(len(velocities), 4, -1)
    d_h = (values[:, 0] - 2 * center + values[:, 1]) / (h * h)
    d_h2 = (values[:, 2] - 2 * center + values[:, 3]) / (h * h / 4)
    return d_h2 + (d_h2 - d_h) / 3.0


def canonical_directions(base, metric_scales):
    """Factor-aligned pullback-orthonormal tangent vectors at ``base``.

    Each factor contributes a round-orthonormal basis of the tangent space of its sphere
    scaled by ``1/sqrt(c_m)``.
    """
    total = sum(len(p) for p in base)
    rows = []
    start = 0
    for p, c in zip(base, metric_scales):
        if not c > 0:
            raise ValueError(f"Metric scale {c} is not positive; the map is not an immersion.")
        basis = null_space(p[None, :])
        for k in range(basis.shape[1]):
            row = np.zeros(total)
            row[start:start + len(p)] = basis[:, k] / np.sqrt(c)
            rows.append(row)
        start += len(p)
    return np.array(rows)


def frame_point(F, base, directions=None, h=FD_STEP):
    """Builds the frame point of F at ``base``.

    :param F: The immersion.
    :type F: ExplicitImmersion
    :param base: Per-factor unit vectors.
    :type base: sequence
    :param directions: Domain tangent vectors of the frame; defaults to the factor-aligned frame.
    :type directions: numpy.ndarray, optional
    :rtype: FramePoint
    """
    base = tuple(np.asarray(p, dtype=float) for p in base)
    if directions is None:
        directions = canonical_directions(base, F.metric_scales)
    frame = first_derivatives(F, base, directions, h)
    basis, _ = np.linalg.qr(frame.T)
    position = F(list(base))
    fp = FramePoint(base, position, directions, frame, basis)
    if fp.orthonormality_error > DEFAULT_TOLERANCES.fd_cmp:
        log.warning("Frame at %s is off orthonormal by %.3e", F.label, fp.orthonormality_error)
    return fp


def _check_unit(u, tol):
    norm = float(np.linalg.norm(u))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"Tangent vector must be a unit vector of the pullback metric; norm {norm!r} was given.")


def sff_at(F, fp, u, h=FD_STEP, tol=DEFAULT_TOLERANCES.float_cmp):
    """Returns ``A(u, u)`` at a frame point by finite differences along a geodesic.

    :param F: The immersion.
    :type F: ExplicitImmersion
    :param fp: The frame point.
    :type fp: FramePoint
    :param u: Coefficients of a pullback-unit tangent vector in the frame ``e_1..e_n``.
    :type u: numpy.ndarray
    :raises ValueError: If ``u`` is not a unit vector or ``h`` is too small.
    :rtype: numpy.ndarray
    """
    u = np.asarray(u, dtype=float)
    _check_unit(u, tol)
    velocity = u @ fp.directions
    raw = second_derivatives(F, fp.base, velocity, h)[0]
    return fp.normal_part(raw)


def sff_sample(F, fp, h=FD_STEP):
    """Builds the full table ``A(e_i, e_j)`` by polarization of finite-difference diagonals.

    ``A(e_i, e_j) = (A(e_i + e_j) - A(e_i - e_j)) / 4`` with ``A(v) = A(v, v)``.
    """
    n = fp.n
    D = fp.directions
    velocities = [D[i] for i in range(n)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for i, j in pairs:
        velocities.append(D[i] + D[j])
        velocities.append(D[i] - D[j])
    raw = second_derivatives(F, fp.base, np.array(velocities), h)
    normal = raw - (raw @ fp.basis) @ fp.basis.T
    table = np.zeros((n, n, normal.shape[1]))
    for i in range(n):
        table[i, i] = normal[i]
    for k, (i, j) in enumerate(pairs):
        value = (normal[n + 2 * k] - normal[n + 2 * k + 1]) / 4.0
        table[i, j] = table[j, i] = value
    return SffSample(fp, table)


def random_rotation(n, rng):
    """A random orthogonal n x n matrix drawn from ``rng``."""
    if n == 1:
        return np.array([[1.0 if rng.random() < 0.5 else -1.0]])
    return ortho_group.rvs(dim=n, random_state=rng)


def rotate_sample(sample, R):
    """Returns the sample in the frame ``e'_i = sum_k R_ki e_k``.

    The table transforms by bilinearity, ``A(e'_i, e'_j) = sum_kl R_ki R_lj A(e_k, e_l)``.
    """
    R = np.asarray(R, dtype=float)
    fp = sample.point
    rotated = replace(fp, directions=R.T @ fp.directions, frame=R.T @ fp.frame)
    table = np.einsum("ki,lj,klN->ijN", R, R, sample.table)
    return SffSample(rotated, table)
