# Finitely supported probability measures on N_0^M and the curvature data of the
# associated tensor-product Veronese immersion.

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from pathlib import Path

import numpy as np

from .config import read_json, write_json
from .spectral import SpectralParams, eigen_dimension, lambda_iso, rho

log = logging.getLogger(__name__)


class MeasureFormatError(ValueError):
    """Raised when a measure file cannot be parsed."""


def parse_rational(value, what="value"):
    """Converts an int, a rational string ``'p/q'`` or a decimal string to a Fraction.

    :raises ValueError: If ``value`` is not a rational number.
    """
    if isinstance(value, bool):
        raise ValueError(f"{what} must be a rational number. {value!r} was given.")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        # Decimal view of the float, not its binary expansion
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ValueError(f"{what} must be a rational number. {value!r} was given.")


@dataclass(frozen=True)
class ProblemInstance:
    """
    A class representing a product of spheres S^{n_1} x ... x S^{n_M}.

    :param factors: The sphere dimensions n_1..n_M, each at least 1.
    :type factors: tuple
    """

    factors: tuple

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise ValueError("A problem instance needs at least one factor.")
        for n in factors:
            if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
                raise ValueError(f"Sphere dimensions must be positive integers. {factors} was given.")
        object.__setattr__(self, "factors", tuple(int(n) for n in factors))

    @property
    def M(self):
        return len(self.factors)

    @property
    def dimension(self):
        """Dimension n of the product manifold."""
        return sum(self.factors)

    @property
    def key(self):
        return ",".join(str(n) for n in self.factors)

    @classmethod
    def parse(cls, text):
        """Builds an instance from a comma separated list such as ``'2,1'``."""
        try:
            factors = tuple(int(t) for t in text.split(",") if t.strip())
        except ValueError:
            raise ValueError(f"Factors must be a comma separated list of integers. '{text}' was given.")
        return cls(factors)


@dataclass(frozen=True)
class Atom:
    """
    A class representing one atom ``weight * delta_{l_vec}`` of a Veronese measure.

    Levels and weight are stored as given; :func:`validate` reports violations.
    """

    l_vec: tuple
    weight: Fraction

    def __post_init__(self):
        object.__setattr__(self, "l_vec", tuple(self.l_vec))
        object.__setattr__(self, "weight", parse_rational(self.weight, "weight"))


def _atom_sort_key(atom):
    return tuple(atom.l_vec), atom.weight


class VeroneseMeasure:
    """
    A class representing a finitely supported probability measure ``sum alpha(l) delta_l``
    on N_0^M. Equality ignores the order of the atoms.
    """

    def __init__(self, instance, atoms, name=None, note=None):
        """Initializes a new measure.

        :param instance: The product of spheres the measure lives on.
        :type instance: ProblemInstance
        :param atoms: The atoms, as :class:`Atom` objects or ``(l_vec, weight)`` pairs.
        :type atoms: iterable
        :param name: Optional label carried into files and reports.
        :type name: str, optional
        :param note: Optional free-form annotation.
        :type note: str, optional
        """
        if not isinstance(instance, ProblemInstance):
            instance = ProblemInstance(tuple(instance))
        self.instance = instance
        converted = [a if isinstance(a, Atom) else Atom(*a) for a in atoms]
        self.atoms = tuple(sorted(converted, key=_atom_sort_key))
        self.name = name
        self.note = note

    @classmethod
    def from_dict(cls, instance, weights, name=None):
        """Builds a measure from a ``{l_vec: weight}`` mapping."""
        return cls(instance, [Atom(tuple(l), w) for l, w in weights.items()], name=name)

    @property
    def M(self):
        return self.instance.M

    @property
    def support(self):
        return [a.l_vec for a in self.atoms]

    @property
    def weights(self):
        return [a.weight for a in self.atoms]

    def weights_float(self):
        """Float view of the weights, in atom order."""
        return np.array([float(a.weight) for a in self.atoms])

    def __eq__(self, other):
        if not isinstance(other, VeroneseMeasure):
            return NotImplemented
        return self.instance == other.instance and self.atoms == other.atoms

    def __hash__(self):
        return hash((self.instance, self.atoms))

    def __repr__(self):
        body = " + ".join(f"{a.weight} d{a.l_vec}" for a in self.atoms)
        return f"VeroneseMeasure({self.instance.factors}: {body})"


def validate(mu):
    """Checks the invariants of a Veronese measure.

    The checks run in order: atoms present, level count, nonnegative integer levels,
    positive weights, distinct levels, weights summing exactly to 1.

    :param mu: The measure to check.
    :type mu: VeroneseMeasure
    :return: ``(True, 'ok')`` or ``(False, description of the first violation)``.
    :rtype: tuple
    """
    if not mu.atoms:
        return False, "measure has no atoms"
    M = mu.instance.M
    for atom in mu.atoms:
        if len(atom.l_vec) != M:
            return False, f"atom {atom.l_vec} has {len(atom.l_vec)} levels, expected {M}"
    for atom in mu.atoms:
        for l in atom.l_vec:
            if isinstance(l, bool) or not isinstance(l, (int, np.integer)) or l < 0:
                return False, f"atom {atom.l_vec} has a level that is not a nonnegative integer"
    for atom in mu.atoms:
        if atom.weight <= 0:
            return False, f"atom {atom.l_vec} has non-positive weight {atom.weight}"
    seen = set()
    for atom in mu.atoms:
        key = tuple(int(l) for l in atom.l_vec)
        if key in seen:
            return False, f"duplicate atom {key}"
        seen.add(key)
    total = sum((a.weight for a in mu.atoms), Fraction(0))
    if total != 1:
        return False, f"weights sum to {total}"
    return True, "ok"


def _require_valid(mu):
    ok, message = validate(mu)
    if not ok:
        raise ValueError(f"Invalid measure: {message}.")


@dataclass(frozen=True)
class CurvatureData:
    """
    A class representing the curvature data ``(A, G)`` of a tensor immersion.

    ``A`` is a symmetric nonnegative M x M matrix and ``G`` a nonnegative vector. Entries
    are Fractions on the exact path and floats on the numeric path.
    """

    A: tuple
    G: tuple

    def __post_init__(self):
        A = tuple(tuple(row) for row in self.A)
        G = tuple(self.G)
        M = len(G)
        if M == 0 or len(A) != M or any(len(row) != M for row in A):
            raise ValueError(f"Curvature data needs an {M}x{M} matrix A and a length-{M} vector G.")
        for a in range(M):
            for b in range(a + 1, M):
                if A[a][b] != A[b][a]:
                    raise ValueError(f"A is not symmetric at ({a}, {b}): {A[a][b]} != {A[b][a]}.")
        if any(g < 0 for g in G) or any(x < 0 for row in A for x in row):
            raise ValueError("Curvature data must have nonnegative entries.")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "G", G)

    @property
    def M(self):
        return len(self.G)

    @property
    def exact(self):
        return all(isinstance(x, (int, Fraction)) for x in self.G) and all(
            isinstance(x, (int, Fraction)) for row in self.A for x in row
        )

    def as_arrays(self):
        """Float copies ``(A, G)`` as numpy arrays."""
        return (np.array([[float(x) for x in row] for row in self.A]),
                np.array([float(g) for g in self.G]))

    def to_float(self):
        A, G = self.as_arrays()
        return CurvatureData(tuple(map(tuple, A.tolist())), tuple(G.tolist()))

    def scaled(self, a_factor=1, g_factor=1):
        """Returns ``(a_factor * A, g_factor * G)``."""
        return CurvatureData(tuple(tuple(a_factor * x for x in row) for row in self.A),
                             tuple(g_factor * g for g in self.G))


@dataclass(frozen=True)
class Expectations:
    """Expectations of the spectral constants under a measure: ``E[rho_m]``, ``E[lambda_m]``,
    ``E[rho_a rho_b]`` and ``E[(lambda_m + 2 rho_m)/3]``."""

    rho: tuple
    lam: tuple
    rho_rho: tuple
    same_factor: tuple


def expectations(mu):
    """Returns the exact expectations of rho, lambda and rho products under ``mu``."""
    _require_valid(mu)
    factors = mu.instance.factors
    M = len(factors)
    e_rho = [Fraction(0)] * M
    e_lam = [Fraction(0)] * M
    e_same = [Fraction(0)] * M
    e_rr = [[Fraction(0)] * M for _ in range(M)]
    for atom in mu.atoms:
        w = atom.weight
        rhos = [rho(SpectralParams(n, int(l))) for n, l in zip(factors, atom.l_vec)]
        lams = [lambda_iso(SpectralParams(n, int(l))) for n, l in zip(factors, atom.l_vec)]
        for m in range(M):
            e_rho[m] += w * rhos[m]
            e_lam[m] += w * lams[m]
            e_same[m] += w * (lams[m] + 2 * rhos[m]) / 3
            for b in range(M):
                e_rr[m][b] += w * rhos[m] * rhos[b]
    return Expectations(tuple(e_rho), tuple(e_lam), tuple(map(tuple, e_rr)), tuple(e_same))


def curvature_data(mu):
    """Returns the curvature data of the tensor immersion built from ``mu``.

    ``A_mm = E[lambda_m]``, ``A_ab = 3 E[rho_a rho_b]`` for ``a != b`` and ``G_m = E[rho_m]``,
    all exact rationals.

    :param mu: A valid measure.
    :type mu: VeroneseMeasure
    :raises ValueError: If ``mu`` is not a valid measure.
    :rtype: CurvatureData
    """
    e = expectations(mu)
    M = mu.M
    A = tuple(tuple(e.lam[a] if a == b else 3 * e.rho_rho[a][b] for b in range(M)) for a in range(M))
    return CurvatureData(A, e.rho)


def ambient_dimension(mu):
    """Returns ``N = sum over atoms of prod_m D(n_m, l_m)``."""
    _require_valid(mu)
    factors = mu.instance.factors
    return sum(prod(eigen_dimension(SpectralParams(n, int(l))) for n, l in zip(factors, a.l_vec))
               for a in mu.atoms)


def immersion_check(data):
    """Checks that every ``G_m`` is positive, i.e. that the tensor map is an immersion.

    :param data: The curvature data.
    :type data: CurvatureData
    :return: ``(True, None)`` or ``(False, m)`` with ``m`` the first degenerate 0-based coordinate.
    :rtype: tuple
    """
    for m, g in enumerate(data.G):
        if not g > 0:
            return False, m
    return True, None


def mix(mu1, mu2, t):
    """Returns the convex combination ``t mu1 + (1 - t) mu2``; coincident atoms merge."""
    if mu1.instance != mu2.instance:
        raise ValueError(f"Cannot mix measures on {mu1.instance.factors} and {mu2.instance.factors}.")
    t = parse_rational(t, "t")
    if not 0 <= t <= 1:
        raise ValueError(f"Mixing parameter must lie in [0, 1]. {t} was given.")
    weights = {}
    for mu, c in ((mu1, t), (mu2, 1 - t)):
        if c == 0:
            continue
        for a in mu.atoms:
            weights[a.l_vec] = weights.get(a.l_vec, Fraction(0)) + c * a.weight
    return VeroneseMeasure.from_dict(mu1.instance, weights)


def permute_factors(mu, perm):
    """Reorders the factors: factor ``k`` of the result is factor ``perm[k]`` of ``mu``."""
    perm = tuple(perm)
    if sorted(perm) != list(range(mu.M)):
        raise ValueError(f"{perm} is not a permutation of {mu.M} factors.")
    instance = ProblemInstance(tuple(mu.instance.factors[p] for p in perm))
    atoms = [Atom(tuple(a.l_vec[p] for p in perm), a.weight) for a in mu.atoms]
    return VeroneseMeasure(instance, atoms, name=mu.name, note=mu.note)


def measure_to_dict(mu):
    """Serializable form: weights as rational strings in lowest terms."""
    out = {
        "factors": list(mu.instance.factors),
        "atoms": [{"l": [int(l) for l in a.l_vec], "w": str(a.weight)} for a in mu.atoms],
    }
    if mu.name:
        out["name"] = mu.name
    if mu.note:
        out["note"] = mu.note
    return out


def measure_from_dict(data, source="measure"):
    """Builds a measure from its serialized form.

    :raises MeasureFormatError: Naming the missing or malformed field.
    """
    if not isinstance(data, dict):
        raise MeasureFormatError(f"{source}: expected an object at the top level.")
    if "factors" not in data:
        raise MeasureFormatError(f"{source}: missing field 'factors'.")
    if "atoms" not in data:
        raise MeasureFormatError(f"{source}: missing field 'atoms'.")
    try:
        instance = ProblemInstance(tuple(data["factors"]))
    except (TypeError, ValueError) as e:
        raise MeasureFormatError(f"{source}: field 'factors': {e}")
    if not isinstance(data["atoms"], list):
        raise MeasureFormatError(f"{source}: field 'atoms' must be an array.")
    atoms = []
    for k, entry in enumerate(data["atoms"]):
        if not isinstance(entry, dict) or "l" not in entry or "w" not in entry:
            raise MeasureFormatError(f"{source}: atoms[{k}] needs fields 'l' and 'w'.")
        if not isinstance(entry["l"], list) or not all(
                isinstance(l, int) and not isinstance(l, bool) for l in entry["l"]):
            raise MeasureFormatError(f"{source}: atoms[{k}].l must be an array of integers.")
        try:
            w = parse_rational(entry["w"], f"atoms[{k}].w")
        except ValueError as e:
            raise MeasureFormatError(f"{source}: {e}")
        atoms.append(Atom(tuple(entry["l"]), w))
    return VeroneseMeasure(instance, atoms, name=data.get("name"), note=data.get("note"))


def load_measure(path):
    """Reads a measure file.

    :param path: Path of a JSON measure file.
    :raises MeasureFormatError: If the file is not a well-formed measure document.
    :rtype: VeroneseMeasure
    """
    path = Path(path)
    try:
        data = read_json(path)
    except ValueError as e:
        raise MeasureFormatError(f"{path.name}: not valid JSON ({e}).")
    return measure_from_dict(data, source=path.name)


def save_measure(mu, path):
    """Writes ``mu`` in the measure file format."""
    write_json(measure_to_dict(mu), path)
    log.info("Saved measure with %d atoms to %s", len(mu.atoms), path)
