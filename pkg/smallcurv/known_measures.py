# Closed-form measures with known critical s, used as fixtures, warm starts and in the
# verify-paper battery.

from dataclasses import dataclass
from fractions import Fraction

from .designs import DesignInput, design_to_measure
from .measure import Atom, ProblemInstance, VeroneseMeasure


@dataclass(frozen=True)
class KnownCase:
    """A measure together with its expected critical s and ambient dimension."""

    label: str
    measure: VeroneseMeasure
    expected_s: Fraction
    expected_dimension: int = None


def sns1_measure(n):
    """The isotropic measure ``2/3 d(1,1) + 1/3 d(0,2)`` on S^n x S^1 (s = 3/2, N = 2n+4)."""
    return VeroneseMeasure(ProblemInstance((n, 1)),
                           [Atom((1, 1), Fraction(2, 3)), Atom((0, 2), Fraction(1, 3))],
                           name=f"sns1_n{n}")


def sphere_measure(n):
    """The single atom ``d(1)`` on S^n: the round inclusion, s = 1."""
    return VeroneseMeasure(ProblemInstance((n,)), [Atom((1,), 1)], name=f"sphere_s{n}")


def two_sphere_measure(n1, n2):
    """The isotropic measure on S^{n1} x S^{n2} with s = (2 n2 + 1)/(n2 + 1)."""
    d = 2 * n2 + 1
    return VeroneseMeasure(ProblemInstance((n1, n2)),
                           [Atom((1, 1), Fraction(n2 + 1, d)), Atom((0, 2), Fraction(n2, d))],
                           name=f"two_spheres_{n1}_{n2}")


def two_sphere_s(n2):
    return Fraction(2 * n2 + 1, n2 + 1)


def two_sphere_dimension(n1, n2):
    return (n1 + 1) * (n2 + 1) + n2 * (n2 + 3) // 2


def three_sphere_measure(n1, n2, n3):
    """The isotropic four-atom measure on S^{n1} x S^{n2} x S^{n3} with s = (6 n3 + 5)/(3 n3 + 3)."""
    d = 6 * n3 + 5
    return VeroneseMeasure(ProblemInstance((n1, n2, n3)), [
        Atom((1, 1, 0), Fraction(n3 + 1, d)),
        Atom((0, 1, 1), Fraction(2 * (n3 + 1), d)),
        Atom((1, 0, 1), Fraction(2 * (n3 + 1), d)),
        Atom((0, 0, 2), Fraction(n3, d)),
    ], name=f"three_spheres_{n1}_{n2}_{n3}")


def three_sphere_s(n3):
    return Fraction(6 * n3 + 5, 3 * n3 + 3)


SN_T2_ATOMS = (
    ((1, 5, 5), Fraction(5, 9)),
    ((0, 2, 11), Fraction(200, 7371)),
    ((0, 5, 10), Fraction(719, 3024)),
    ((0, 11, 2), Fraction(3025, 16848)),
)


def sn_t2_measure(n):
    """The isotropic measure on S^n x S^1 x S^1 with s = 9/5 and N = 4n + 16."""
    return VeroneseMeasure(ProblemInstance((n, 1, 1)), [Atom(l, w) for l, w in SN_T2_ATOMS],
                           name=f"sn_t2_n{n}")


# Lattice points of radius 5 in Z^2 and their weights; the folded design is a weighted 4-design.
PYTHAGOREAN_FOLDED = (
    ((5, 0), Fraction(527, 2304)),
    ((0, 5), Fraction(527, 2304)),
    ((3, 4), Fraction(625, 2304)),
    ((4, 3), Fraction(625, 2304)),
)


def pythagorean_design(unfolded=True):
    """The weighted Pythagorean design on the circle of radius 5.

    With ``unfolded`` the weight of each folded point is split evenly over all its sign
    changes, giving the 12 lattice points of norm 5.
    """
    if not unfolded:
        return DesignInput(25, tuple(p for p, _ in PYTHAGOREAN_FOLDED),
                           tuple(w for _, w in PYTHAGOREAN_FOLDED), name="pythagorean")
    points, weights = [], []
    for (a, b), w in PYTHAGOREAN_FOLDED:
        images = sorted({(sa * a, sb * b) for sa in (1, -1) for sb in (1, -1)})
        for p in images:
            points.append(p)
            weights.append(w / len(images))
    return DesignInput(25, tuple(points), tuple(weights), name="pythagorean")


def pythagorean_torus_measure():
    """The folded Pythagorean design as a measure on T^2 (s = 3/2)."""
    mu = design_to_measure(pythagorean_design(), ProblemInstance((1, 1)))
    mu.name = "pythagorean_torus"
    return mu


def known_cases(max_index=5):
    """All closed-form cases with their expected critical s and ambient dimension."""
    cases = []
    for n in (1, 2, 3):
        cases.append(KnownCase(f"round S^{n}", sphere_measure(n), Fraction(1), n + 1))
    for n in (2, 3):
        cases.append(KnownCase(f"S^{n} x S^1", sns1_measure(n), Fraction(3, 2), 2 * n + 4))
    for n2 in range(1, max_index + 1):
        for n1 in (1, 2):
            cases.append(KnownCase(f"S^{n1} x S^{n2}", two_sphere_measure(n1, n2), two_sphere_s(n2),
                                   two_sphere_dimension(n1, n2)))
    for n3 in range(1, max_index + 1):
        cases.append(KnownCase(f"S^1 x S^1 x S^{n3}", three_sphere_measure(1, 1, n3), three_sphere_s(n3)))
    for n in (1, 2, 3):
        cases.append(KnownCase(f"S^{n} x T^2", sn_t2_measure(n), Fraction(9, 5), 4 * n + 16))
    cases.append(KnownCase("T^2 Pythagorean design", pythagorean_torus_measure(), Fraction(3, 2)))
    return cases


# Bundled measure fixtures and the constructors they must reproduce.
BUNDLED_MEASURES = {
    "sphere_s2.json": (lambda: sphere_measure(2), Fraction(1)),
    "sns1_n2.json": (lambda: sns1_measure(2), Fraction(3, 2)),
    "two_spheres_2_2.json": (lambda: two_sphere_measure(2, 2), Fraction(5, 3)),
    "three_spheres_2_2_2.json": (lambda: three_sphere_measure(2, 2, 2), Fraction(17, 9)),
    "sn_t2_n2.json": (lambda: sn_t2_measure(2), Fraction(9, 5)),
    "pythagorean_torus.json": (pythagorean_torus_measure, Fraction(3, 2)),
}
