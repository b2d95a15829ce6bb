# Intrinsic and conformal curvature quantities evaluated from second fundamental form samples.
#
# Indices are 0-based frame indices. Conformal quantities refer to g~ = e^{2 psi} g with
# psi = -(c/2)|x|^2 and are reported rescaled by e^{2 psi}, which is what the curvature
# expressions below evaluate exactly.

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import sqrt

import numpy as np

from .config import FD_STEP, FRAMES_PER_POINT, PIC_GRID_SIZE
from .immersion.frames import frame_point, random_rotation, rotate_sample, sff_sample
from .immersion.sampling import random_base_point, sample_sff_norms
from .measure import VeroneseMeasure, expectations, validate

log = logging.getLogger(__name__)

# Constants of the experimental conditions, echoed in reports and never asserted.
BIRICCI_REFERENCE = sqrt(12.0 / 7.0)
RIC_EIGEN_REFERENCE = sqrt(9.0 / 5.0)

CONDITIONS = ("sec", "pic2", "angle", "offdiag", "biricci", "ric-eigen")


@dataclass(frozen=True)
class PicParams:
    """The PIC-2 parameters ``lam, mu`` in [-1, 1]."""

    lam: float
    mu: float

    def __post_init__(self):
        for name in ("lam", "mu"):
            value = getattr(self, name)
            if not -1.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [-1, 1]. {value!r} was given.")


@dataclass(frozen=True)
class Pic2Blocks:
    """The vectors W, X, Y, Z and S = (1+lam^2) W + (1+mu^2) X of a 4-frame."""

    W: np.ndarray = field(repr=False)
    X: np.ndarray = field(repr=False)
    Y: np.ndarray = field(repr=False)
    Z: np.ndarray = field(repr=False)
    S: np.ndarray = field(repr=False)


def _dot(a, b):
    return float(np.dot(a, b))


# ---------------------------------------------------------------------------------------------
# Gauss equation


def gauss_rm(s, i, j, k, l):
    """``Rm(e_i,e_j,e_k,e_l) = <A_il, A_jk> - <A_ik, A_jl>``; ``Rm(i,j,j,i)`` is a sectional curvature."""
    T = s.table
    return _dot(T[i, l], T[j, k]) - _dot(T[i, k], T[j, l])


def _ric_form(s, u):
    # Ric(u,u) = <A(u,u), H> - sum_k |A(u, e_k)|^2 for frame coefficients u
    Au = np.einsum("i,j,ijN->N", u, u, s.table)
    Auk = np.einsum("i,ikN->kN", u, s.table)
    return _dot(Au, s.mean_curvature) - float(np.sum(Auk * Auk))


def gauss_ricci(s, i):
    """``Ric(e_i,e_i) = <A_ii, H> - sum_j |A_ij|^2``."""
    T = s.table
    return _dot(T[i, i], s.mean_curvature) - float(np.sum(T[i] * T[i]))


def ricci_matrix(s):
    """The Ricci matrix in the frame, off-diagonal entries by polarization of ``Ric(u,u)``."""
    n = s.n
    eye = np.eye(n)
    R = np.zeros((n, n))
    for i in range(n):
        R[i, i] = gauss_ricci(s, i)
        for j in range(i + 1, n):
            R[i, j] = R[j, i] = (_ric_form(s, eye[i] + eye[j]) - _ric_form(s, eye[i] - eye[j])) / 4.0
    return R


def scalar_curvature(s):
    return float(np.trace(ricci_matrix(s)))


# ---------------------------------------------------------------------------------------------
# Traced Gauss identity R = 3/2 |H|^2 - n(n+2)/2 avg |A(u,u)|^2


@dataclass(frozen=True)
class PetruninCheck:
    """Both sides of the traced Gauss identity and their difference."""

    scalar: object
    mean_curvature2: object
    average: object
    residual: object
    path: str

    def to_dict(self):
        def fmt(x):
            return str(x) if isinstance(x, Fraction) else float(x)

        return {"scalar": fmt(self.scalar), "mean_curvature2": fmt(self.mean_curvature2),
                "average": fmt(self.average), "residual": fmt(self.residual), "path": self.path}


def _petrunin_exact(mu):
    ok, message = validate(mu)
    if not ok:
        raise ValueError(f"Invalid measure: {message}.")
    e = expectations(mu)
    factors = mu.instance.factors
    M = len(factors)
    n = sum(factors)
    G = e.rho
    if any(g == 0 for g in G):
        raise ValueError("The tensor map is not an immersion.")
    A = [[e.lam[a] if a == b else 3 * e.rho_rho[a][b] for b in range(M)] for a in range(M)]
    scalar = sum((Fraction(nm * (nm - 1)) / g for nm, g in zip(factors, G)), Fraction(0))
    h2 = Fraction(0)
    for a, na in enumerate(factors):
        h2 += (na * e.lam[a] + na * (na - 1) * e.same_factor[a]) / (G[a] * G[a])
        for b, nb in enumerate(factors):
            if a != b:
                h2 += na * nb * e.rho_rho[a][b] / (G[a] * G[b])
    average = Fraction(0)
    for a, na in enumerate(factors):
        for b, nb in enumerate(factors):
            moment = na * nb + (2 * na if a == b else 0)
            average += A[a][b] * moment / (n * (n + 2) * G[a] * G[b])
    rhs = Fraction(3, 2) * h2 - Fraction(n * (n + 2), 2) * average
    return PetruninCheck(scalar, h2, average, abs(scalar - rhs), "closed-form")


def _quartic_average_moments(s):
    T = s.table
    n = s.n
    total = 0.0
    for i in range(n):
        total += 3.0 * _dot(T[i, i], T[i, i])
        for j in range(n):
            if i != j:
                total += _dot(T[i, i], T[j, j]) + 2.0 * _dot(T[i, j], T[i, j])
    return total / (n * (n + 2))


def _quartic_average_monte_carlo(s, count, rng):
    z = rng.standard_normal((count, s.n))
    z /= np.linalg.norm(z, axis=1)[:, None]
    Au = np.einsum("ki,kj,ijN->kN", z, z, s.table)
    return float(np.mean(np.sum(Au * Au, axis=1)))


def petrunin_scalar_check(data, method="moments", count=20000, seed=0):
    """Evaluates both sides of ``R = 3/2 |H|^2 - n(n+2)/2 avg_{|u|=1} |A(u,u)|^2``.

    :param data: A :class:`VeroneseMeasure` (exact closed-form path) or an :class:`SffSample`.
    :param method: For samples, ``'moments'`` uses exact quartic sphere moments and
        ``'monte-carlo'`` averages over ``count`` random directions.
    :type method: str, optional
    :rtype: PetruninCheck
    """
    if isinstance(data, VeroneseMeasure):
        return _petrunin_exact(data)
    n = data.n
    H = data.mean_curvature
    h2 = _dot(H, H)
    scalar = scalar_curvature(data)
    if method == "moments":
        average = _quartic_average_moments(data)
    elif method == "monte-carlo":
        average = _quartic_average_monte_carlo(data, count, np.random.default_rng(seed))
    else:
        raise ValueError(f"method must be 'moments' or 'monte-carlo'. '{method}' was given.")
    rhs = 1.5 * h2 - 0.5 * n * (n + 2) * average
    return PetruninCheck(scalar, h2, average, abs(scalar - rhs), method)


# ---------------------------------------------------------------------------------------------
# Pointwise bounds


@dataclass(frozen=True)
class AngleBound:
    lhs: float
    rhs: float
    margin: float


def angle_bound(fp, c):
    """Compares ``|x_perp|`` with ``1 + (c/2)(|x|^2 - 1)``.

    :param fp: The frame point.
    :type fp: FramePoint
    :param c: A curvature bound, at most 2.
    :type c: float
    :raises ValueError: If ``c > 2``.
    :rtype: AngleBound
    """
    if c > 2:
        raise ValueError(f"The angle estimate needs c <= 2. {c!r} was given.")
    lhs = float(np.linalg.norm(fp.x_perp))
    rhs = 1.0 + 0.5 * c * (_dot(fp.position, fp.position) - 1.0)
    return AngleBound(lhs, rhs, lhs - rhs)


def offdiag_bound(s, i, j, c_f):
    """Margin ``4 c_f^2 - (|A_ii + A_jj|^2 + 4 |A_ij|^2)``; nonnegative when ``c_f`` bounds the curvature."""
    if i == j:
        raise ValueError("offdiag_bound needs two distinct frame indices.")
    T = s.table
    v = T[i, i] + T[j, j]
    return 4.0 * c_f * c_f - (_dot(v, v) + 4.0 * _dot(T[i, j], T[i, j]))


def conformal_sec(s, i, j, c):
    """Rescaled conformal sectional curvature ``e^{2 psi} sec~(e_i, e_j)``.

    ``2c + <A_ii, A_jj> - |A_ij|^2 + c <x_perp, A_ii + A_jj> + c^2 (<x,e_i>^2 + <x,e_j>^2) - c^2 |x_tan|^2``.
    """
    if i == j:
        raise ValueError("conformal_sec needs two distinct frame indices.")
    T = s.table
    fp = s.point
    x = fp.position
    x_perp = fp.x_perp
    xt = fp.x_tan
    xi = _dot(x, fp.frame[i])
    xj = _dot(x, fp.frame[j])
    return (2.0 * c + _dot(T[i, i], T[j, j]) - _dot(T[i, j], T[i, j])
            + c * _dot(x_perp, T[i, i] + T[j, j])
            + c * c * (xi * xi + xj * xj) - c * c * _dot(xt, xt))


def sec_chain_bound(fp, c_f):
    """Lower bound ``6 - 2 c_f^2 + 6 |x_perp|^2 - 9 |x|^2`` for ``conformal_sec`` at ``c = 3``."""
    return 6.0 - 2.0 * c_f * c_f + 6.0 * _dot(fp.x_perp, fp.x_perp) - 9.0 * _dot(fp.position, fp.position)


def pic2_chain_bound(fp, c_f):
    """Lower bound ``8 - 3 c_f^2 + 12 |x_perp|^2 - 16 |x|^2`` for the normalized PIC-2 quantity at ``c = 4``."""
    return 8.0 - 3.0 * c_f * c_f + 12.0 * _dot(fp.x_perp, fp.x_perp) - 16.0 * _dot(fp.position, fp.position)


def _check_four(s, frame):
    if s.n < 4:
        raise ValueError(f"PIC-2 needs dimension at least 4. n = {s.n} was given.")
    frame = tuple(frame)
    if len(frame) != 4 or len(set(frame)) != 4 or any(not 0 <= k < s.n for k in frame):
        raise ValueError(f"PIC-2 needs four distinct frame indices. {frame} was given.")
    return frame


def pic2_quantity(s, frame, p, c):
    """Rescaled PIC-2 quantity of the frame ``(e1, e2, e3, e4)``.

    ``sec~13 + lam^2 sec~14 + mu^2 sec~23 + lam^2 mu^2 sec~24 - 2 lam mu Rm(e1, e2, e3, e4)``, each
    ``sec~`` rescaled as in :func:`conformal_sec` and the mixed term taken from the Gauss equation.

    :raises ValueError: If ``n < 4`` or the indices are not distinct.
    """
    e1, e2, e3, e4 = _check_four(s, frame)
    lam2, mu2 = p.lam * p.lam, p.mu * p.mu
    return (conformal_sec(s, e1, e3, c) + lam2 * conformal_sec(s, e1, e4, c)
            + mu2 * conformal_sec(s, e2, e3, c) + lam2 * mu2 * conformal_sec(s, e2, e4, c)
            - 2.0 * p.lam * p.mu * gauss_rm(s, e1, e2, e3, e4))


def pic2_blocks(s, frame, p):
    """The vectors W, X, Y, Z, S of a 4-frame."""
    e1, e2, e3, e4 = _check_four(s, frame)
    T = s.table
    lam, mu = p.lam, p.mu
    W = T[e1, e1] + mu * mu * T[e2, e2]
    X = T[e3, e3] + lam * lam * T[e4, e4]
    Y = T[e1, e3] - lam * mu * T[e2, e4]
    Z = lam * T[e1, e4] + mu * T[e2, e3]
    S = (1.0 + lam * lam) * W + (1.0 + mu * mu) * X
    return Pic2Blocks(W, X, Y, Z, S)


def pic2_helper_margins(s, frame, p, c_f):
    """Margins of ``|S|^2 + 4(1+lam^2)(1+mu^2)|V|^2 <= 4(1+lam^2)^2(1+mu^2)^2 c_f^2`` for V = Y and V = Z.

    :return: ``(margin_y, margin_z)``.
    :rtype: tuple
    """
    b = pic2_blocks(s, frame, p)
    a, m = 1.0 + p.lam * p.lam, 1.0 + p.mu * p.mu
    rhs = 4.0 * a * a * m * m * c_f * c_f
    s2 = _dot(b.S, b.S)
    return (rhs - (s2 + 4.0 * a * m * _dot(b.Y, b.Y)),
            rhs - (s2 + 4.0 * a * m * _dot(b.Z, b.Z)))


# ---------------------------------------------------------------------------------------------
# Experimental conditions


def conformal_ricci_matrix(s, c):
    """Rescaled conformal Ricci matrix ``e^{2 psi} Ric~(e~_i, e~_j)``.

    ``Ric_ij + (n-2) c (delta_ij + <x_perp, A_ij>) + (n-2) c^2 <x,e_i><x,e_j>
    - (-c (n + <x_perp, H>) + (n-2) c^2 |x_tan|^2) delta_ij``.
    """
    n = s.n
    fp = s.point
    x_perp = fp.x_perp
    xt = fp.x_tan
    xe = fp.frame @ fp.position
    second = np.eye(n) + np.einsum("ijN,N->ij", s.table, x_perp)
    laplace = -c * (n + _dot(x_perp, s.mean_curvature)) + (n - 2) * c * c * _dot(xt, xt)
    return (ricci_matrix(s) + (n - 2) * c * second + (n - 2) * c * c * np.outer(xe, xe)
            - laplace * np.eye(n))


@dataclass(frozen=True)
class ExperimentalReport:
    """Values of an exploratory condition at one sample; ``margin > 0`` means the condition holds there."""

    which: str
    c: float
    values: dict
    margin: float
    reference: float

    def to_dict(self):
        return {"which": self.which, "c": self.c, "values": self.values, "margin": self.margin,
                "reference": self.reference}


def experimental_conditions(s, which, c=0.0):
    """Evaluates the bi-Ricci or Ricci-eigenvalue condition of the conformal metric at a sample.

    ``biricci`` reports ``Ric~11 + Ric~22 - sec~12`` for every frame pair. ``ric_eigen`` reports the
    sorted eigenvalues of ``Ric~`` and, for n = 4, the margin ``l1 + l2 + l3 - l4``; for other n
    the margin is ``scal~ - 2 max eigenvalue`` together with ``scal~ - 2 Ric~_ii`` per frame vector.

    :param which: ``'biricci'`` or ``'ric_eigen'`` (``'ric-eigen'`` is accepted).
    :type which: str
    :raises ValueError: For ``n < 2`` or an unknown condition.
    :rtype: ExperimentalReport
    """
    which = which.replace("-", "_")
    n = s.n
    if n < 2:
        raise ValueError(f"Experimental conditions need dimension at least 2. n = {n} was given.")
    ric = conformal_ricci_matrix(s, c)
    if which == "biricci":
        values = {}
        for i, j in combinations(range(n), 2):
            values[f"{i + 1},{j + 1}"] = float(ric[i, i] + ric[j, j] - conformal_sec(s, i, j, c))
        return ExperimentalReport("biricci", c, values, min(values.values()), BIRICCI_REFERENCE)
    if which == "ric_eigen":
        eig = np.sort(np.linalg.eigvalsh(ric))
        scal = float(eig.sum())
        values = {"eigenvalues": [float(x) for x in eig], "scalar": scal}
        if n == 4:
            margin = float(eig[0] + eig[1] + eig[2] - eig[3])
        else:
            margin = scal - 2.0 * float(eig[-1])
            values["frame_margins"] = [scal - 2.0 * float(ric[i, i]) for i in range(n)]
        return ExperimentalReport("ric_eigen", c, values, margin, RIC_EIGEN_REFERENCE)
    raise ValueError(f"which must be 'biricci' or 'ric_eigen'. '{which}' was given.")


# ---------------------------------------------------------------------------------------------
# Batch certification


def pic_grid(size=PIC_GRID_SIZE):
    """Uniform ``size x size`` grid on [-1, 1]^2 together with the corners and (0, 0)."""
    axis = np.linspace(-1.0, 1.0, size)
    points = {(float(a), float(b)) for a in axis for b in axis}
    points |= {(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0), (0.0, 0.0)}
    return sorted(points)


@dataclass
class CertificationReport:
    """
    A class representing the outcome of certifying one condition over sampled frames.

    ``min_margin`` is the smallest margin seen; ``argmin`` names the sample, frame and indices
    where it occurred. ``chain_margin`` is the smallest excess of the exact quantity over its
    lower-bound chain, when the condition has one.
    """

    condition: str
    c: float
    c_f: float
    samples: int
    frames_per_point: int
    seed: int
    min_margin: float = np.inf
    max_margin: float = -np.inf
    argmin: dict = field(default_factory=dict)
    chain_margin: float = None
    helper_margin: float = None
    grid_minima: dict = None
    reference: float = None
    evaluations: int = 0

    def record(self, margin, where):
        self.evaluations += 1
        if margin < self.min_margin:
            self.min_margin = float(margin)
            self.argmin = dict(where)
        if margin > self.max_margin:
            self.max_margin = float(margin)

    def passed(self, tol=0.0):
        """True when every margin is at least ``-tol`` (not meaningful for experimental conditions)."""
        return self.min_margin >= -tol

    def to_dict(self):
        out = {
            "condition": self.condition, "c": self.c, "c_f": self.c_f, "samples": self.samples,
            "frames_per_point": self.frames_per_point, "seed": self.seed,
            "min_margin": self.min_margin, "max_margin": self.max_margin, "argmin": self.argmin,
            "evaluations": self.evaluations,
        }
        if self.chain_margin is not None:
            out["chain_margin"] = self.chain_margin
        if self.helper_margin is not None:
            out["helper_margin"] = self.helper_margin
        if self.grid_minima is not None:
            out["grid_minima"] = {f"{lam:g},{mu:g}": v for (lam, mu), v in sorted(self.grid_minima.items())}
        if self.reference is not None:
            out["reference"] = self.reference
        return out


def default_c(condition, c_f):
    """The conformal constant used when none is given: 3 for sec, 4 for pic2, c_f for angle, else 0."""
    return {"sec": 3.0, "pic2": 4.0, "angle": c_f}.get(condition, 0.0)


def measured_curvature(F, samples=200, seed=0, h=FD_STEP):
    """The closed-form normal curvature of F when known, otherwise the sampled maximum."""
    if F.normal_curvature is not None:
        return float(F.normal_curvature)
    norms, _ = sample_sff_norms(F, samples, seed, h)
    return float(norms.max())


def sample_frames(F, samples, frames_per_point=FRAMES_PER_POINT, seed=0, h=FD_STEP):
    """Yields ``(sample index, frame index, SffSample)``; frame 0 is factor-aligned, the rest random rotations."""
    for k in range(samples):
        rng = np.random.default_rng([seed, k])
        base = random_base_point(F.domain.factors, rng)
        fp = frame_point(F, base, h=h)
        canonical = sff_sample(F, fp, h)
        yield k, 0, canonical
        for f in range(1, frames_per_point + 1):
            yield k, f, rotate_sample(canonical, random_rotation(canonical.n, rng))


def certify(F, condition, c=None, c_f=None, samples=100, frames_per_point=FRAMES_PER_POINT, seed=0,
            grid_size=PIC_GRID_SIZE, h=FD_STEP, log_progress=False):
    """Evaluates one curvature condition over seeded sample points and frames.

    ``sec``: ``conformal_sec`` over all frame pairs. ``pic2``: ``pic2_quantity`` on the first four
    frame vectors over the (lam, mu) grid, plus the helper-lemma margins. ``angle``: the angle
    estimate with ``c`` (default ``c_f``). ``offdiag``: the off-diagonal bound with ``c_f`` over all
    pairs. ``biricci`` and ``ric-eigen``: the exploratory conditions.

    :param F: The immersion.
    :type F: ExplicitImmersion
    :param condition: One of ``sec, pic2, angle, offdiag, biricci, ric-eigen``.
    :type condition: str
    :param c: Conformal constant; defaults per :func:`default_c`.
    :type c: float, optional
    :param c_f: Curvature bound; defaults to :func:`measured_curvature`.
    :type c_f: float, optional
    :rtype: CertificationReport
    """
    if condition not in CONDITIONS:
        raise NameError(f"Unknown condition '{condition}'. Expected one of {', '.join(CONDITIONS)}.")
    if samples < 1:
        raise ValueError(f"samples must be positive. {samples} was given.")
    if c_f is None:
        c_f = measured_curvature(F, seed=seed, h=h)
    if c is None:
        c = default_c(condition, c_f)
    level = logging.INFO if log_progress else logging.DEBUG
    report = CertificationReport(condition, float(c), float(c_f), samples, frames_per_point, seed)
    n = F.dimension
    if condition == "pic2":
        if n < 4:
            raise ValueError(f"PIC-2 needs dimension at least 4. {F.label} has dimension {n}.")
        grid = pic_grid(grid_size)
        report.grid_minima = {}
    if condition in ("biricci", "ric-eigen"):
        report.reference = BIRICCI_REFERENCE if condition == "biricci" else RIC_EIGEN_REFERENCE

    def track_chain(value):
        report.chain_margin = value if report.chain_margin is None else min(report.chain_margin, value)

    def track_helper(value):
        report.helper_margin = value if report.helper_margin is None else min(report.helper_margin, value)

    last = -1
    for k, f, s in sample_frames(F, samples, frames_per_point, seed, h):
        if k != last and k % 100 == 0:
            log.log(level, "- Certifying %s at sample #%d", condition, k)
        last = k
        fp = s.point
        where = {"sample": k, "frame": f}
        if condition == "sec":
            bound = sec_chain_bound(fp, c_f)
            for i, j in combinations(range(n), 2):
                value = conformal_sec(s, i, j, c)
                report.record(value, {**where, "pair": [i + 1, j + 1]})
                if c == 3.0:
                    track_chain(value - bound)
        elif condition == "pic2":
            bound = pic2_chain_bound(fp, c_f)
            for lam, mu in grid:
                p = PicParams(lam, mu)
                value = pic2_quantity(s, (0, 1, 2, 3), p, c)
                report.record(value, {**where, "lam": lam, "mu": mu})
                key = (lam, mu)
                report.grid_minima[key] = min(report.grid_minima.get(key, np.inf), value)
                if c == 4.0:
                    track_chain(value / ((1 + lam * lam) * (1 + mu * mu)) - bound)
                track_helper(min(pic2_helper_margins(s, (0, 1, 2, 3), p, c_f)))
        elif condition == "angle":
            if f == 0:
                report.record(angle_bound(fp, c).margin, where)
        elif condition == "offdiag":
            for i, j in combinations(range(n), 2):
                report.record(offdiag_bound(s, i, j, c_f), {**where, "pair": [i + 1, j + 1]})
        else:
            result = experimental_conditions(s, condition, c)
            report.record(result.margin, where)
    log.log(level, "- Certified %s on %s: min margin %.6g", condition, F.label, report.min_margin)
    return report
