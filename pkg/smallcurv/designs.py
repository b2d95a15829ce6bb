# Weighted spherical 4-designs and the torus measures obtained by folding them onto N_0^M.

import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .config import DEFAULT_TOLERANCES, read_json
from .measure import Atom, MeasureFormatError, ProblemInstance, VeroneseMeasure, parse_rational

log = logging.getLogger(__name__)


class DesignError(ValueError):
    """Raised for design inputs that violate their invariants."""


def _coordinate(value, where):
    if isinstance(value, float):
        return value
    try:
        return parse_rational(value, where)
    except ValueError as e:
        raise DesignError(str(e))


@dataclass(frozen=True)
class DesignInput:
    """
    A class representing a weighted point set on the sphere of radius Q in R^M.

    Coordinates are rationals (exact path) or floats (numeric path); weights are positive
    rationals summing to 1.

    :param radius2: The common squared norm Q^2 of the points.
    :param points: The points u_k = Q * u_hat_k.
    :param weights: One positive weight per point.
    """

    radius2: object
    points: tuple
    weights: tuple
    name: str = None

    def __post_init__(self):
        points = tuple(tuple(p) for p in self.points)
        weights = tuple(parse_rational(w, "weight") for w in self.weights)
        if not points:
            raise DesignError("A design needs at least one point.")
        if len(points) != len(weights):
            raise DesignError(f"{len(points)} points but {len(weights)} weights.")
        M = len(points[0])
        if M == 0 or any(len(p) != M for p in points):
            raise DesignError("All design points must have the same nonzero length.")
        if any(w <= 0 for w in weights):
            raise DesignError("Design weights must be positive.")
        total = sum(weights, Fraction(0))
        if total != 1:
            raise DesignError(f"Design weights sum to {total}, expected 1.")
        radius2 = self.radius2 if isinstance(self.radius2, float) else parse_rational(self.radius2, "radius2")
        if not radius2 > 0:
            raise DesignError(f"radius2 must be positive. {radius2} was given.")
        exact = not isinstance(radius2, float) and all(not isinstance(x, float) for p in points for x in p)
        for k, p in enumerate(points):
            norm2 = sum(x * x for x in p)
            if exact:
                if norm2 != radius2:
                    raise DesignError(f"Point {k} has squared norm {norm2}, expected {radius2}.")
            elif abs(float(norm2) - float(radius2)) > DEFAULT_TOLERANCES.roundoff * max(1.0, float(radius2)):
                raise DesignError(f"Point {k} has squared norm {float(norm2)!r}, expected {float(radius2)!r}.")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "radius2", radius2)

    @property
    def M(self):
        return len(self.points[0])

    @property
    def exact(self):
        return not isinstance(self.radius2, float) and all(
            not isinstance(x, float) for p in self.points for x in p)


def load_design(path):
    """Reads a design file ``{"radius2": ..., "points": [[...]], "weights": [...]}``.

    :raises MeasureFormatError: If a field is missing or malformed.
    :raises DesignError: If the points or weights violate the design invariants.
    """
    path = Path(path)
    try:
        data = read_json(path)
    except ValueError as e:
        raise MeasureFormatError(f"{path.name}: not valid JSON ({e}).")
    for key in ("radius2", "points", "weights"):
        if key not in data:
            raise MeasureFormatError(f"{path.name}: missing field '{key}'.")
    points = [tuple(_coordinate(x, f"points[{k}]") for x in p) for k, p in enumerate(data["points"])]
    radius2 = data["radius2"] if isinstance(data["radius2"], float) else _coordinate(data["radius2"], "radius2")
    return DesignInput(radius2, tuple(points), tuple(data["weights"]), name=data.get("name", path.stem))


@dataclass(frozen=True)
class MomentCheck:
    """One normalized moment identity of a design."""

    identity: str
    expected: object
    actual: object
    residual: object
    holds: bool


@dataclass(frozen=True)
class MomentReport:
    checks: tuple
    exact: bool

    @property
    def passed(self):
        return all(c.holds for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.holds]

    def to_dict(self):
        def fmt(x):
            return str(x) if isinstance(x, Fraction) else float(x)

        return {
            "exact": self.exact,
            "passed": self.passed,
            "checks": [{"identity": c.identity, "expected": fmt(c.expected), "actual": fmt(c.actual),
                        "residual": fmt(c.residual), "holds": c.holds} for c in self.checks],
        }


def check_design_moments(d, tol=DEFAULT_TOLERANCES.roundoff):
    """Verifies the normalized second and fourth moment identities of a design.

    With ``n = M``: ``sum w u_m^2 = 1/n``, ``sum w u_m^4 = 3/(n(n+2))`` and
    ``sum w u_a^2 u_b^2 = 1/(n(n+2))`` for ``a < b``, with ``u = u_hat`` normalized to the
    unit sphere. Rational designs are checked exactly.

    :param d: The design.
    :type d: DesignInput
    :param tol: Residual tolerance of the float path.
    :type tol: float, optional
    :rtype: MomentReport
    """
    n = d.M
    exact = d.exact
    if exact:
        q2 = d.radius2
        sq = [[Fraction(x) * Fraction(x) / q2 for x in p] for p in d.points]
        w = list(d.weights)
        zero = Fraction(0)
        second, pure, mixed = Fraction(1, n), Fraction(3, n * (n + 2)), Fraction(1, n * (n + 2))
    else:
        q2 = float(d.radius2)
        sq = [[float(x) * float(x) / q2 for x in p] for p in d.points]
        w = [float(x) for x in d.weights]
        zero = 0.0
        second, pure, mixed = 1.0 / n, 3.0 / (n * (n + 2)), 1.0 / (n * (n + 2))

    def moment(f):
        total = zero
        for wk, s in zip(w, sq):
            total += wk * f(s)
        return total

    def check(identity, expected, actual):
        residual = actual - expected
        holds = residual == 0 if exact else abs(residual) <= tol
        return MomentCheck(identity, expected, actual, residual, holds)

    checks = []
    for m in range(n):
        checks.append(check(f"second moment m={m + 1}", second, moment(lambda s: s[m])))
    for m in range(n):
        checks.append(check(f"pure fourth moment m={m + 1}", pure, moment(lambda s: s[m] * s[m])))
    for a in range(n):
        for b in range(a + 1, n):
            checks.append(check(f"mixed fourth moment ({a + 1},{b + 1})", mixed, moment(lambda s: s[a] * s[b])))
    report = MomentReport(tuple(checks), exact)
    if not report.passed:
        log.info("Design %s fails %d moment identities", d.name, len(report.failures))
    return report


def torus_design_bound(n):
    """Returns ``3n/(n+2)``, the critical s reached on T^n by a measure from a 4-design."""
    return Fraction(3 * n, n + 2)


def design_to_measure(d, instance=None):
    """Folds a design on Z^M into a measure on the torus ``(S^1)^M``.

    Each point is folded to its componentwise absolute value, which leaves rho(1, l) = l^2 and
    lambda(1, l) = l^4 unchanged; coincident folded points merge their weights.

    :param d: A design with integer coordinates.
    :type d: DesignInput
    :param instance: The all-circles instance; defaults to ``(1,) * M``.
    :type instance: ProblemInstance, optional
    :raises DesignError: For non-integer coordinates, the zero vector or a non-torus instance.
    :rtype: VeroneseMeasure
    """
    if instance is None:
        instance = ProblemInstance((1,) * d.M)
    if any(n != 1 for n in instance.factors):
        raise DesignError(f"Designs fold onto products of circles only. {instance.factors} was given.")
    if instance.M != d.M:
        raise DesignError(f"Design lives in R^{d.M} but the instance has {instance.M} factors.")
    weights = {}
    for k, (p, w) in enumerate(zip(d.points, d.weights)):
        folded = []
        for x in p:
            if isinstance(x, float):
                if not x.is_integer():
                    raise DesignError(f"Point {k} has non-integer coordinate {x!r}.")
                folded.append(abs(int(x)))
            else:
                x = Fraction(x)
                if x.denominator != 1:
                    raise DesignError(f"Point {k} has non-integer coordinate {x}.")
                folded.append(abs(x.numerator))
        if not any(folded):
            raise DesignError(f"Point {k} is the zero vector.")
        key = tuple(folded)
        weights[key] = weights.get(key, Fraction(0)) + w
    return VeroneseMeasure(instance, [Atom(l, w) for l, w in weights.items()], name=d.name)
