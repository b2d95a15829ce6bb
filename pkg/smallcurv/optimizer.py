# Search for measures minimizing the critical s on a product of spheres.
#
# minimize_s scans every support of one or two atoms from the level grid, then runs seeded
# random restarts with local moves (add, remove, shift a level by one) under an annealing
# acceptance rule. Weights at fixed support are re-optimized by pairwise mass transfers.
# The winner is re-evaluated exactly and refined by solving the isotropic system on its
# support.

import logging
import math
import time
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from itertools import combinations, product
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares, minimize_scalar

from .config import DEFAULT_TOLERANCES, read_json, write_json
from .copositivity import NUMERIC, critical_s, face_extremum, is_isotropic
from .exact_linalg import solve_affine
from .measure import (Atom, VeroneseMeasure, curvature_data, load_measure,
                      save_measure, validate)
from .spectral import SpectralParams, lambda_iso, rho

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConfig:
    """
    A class representing the settings of :func:`minimize_s`.

    :param l_max: Largest level per coordinate on the search grid.
    :param max_support: Largest number of atoms of a candidate.
    :param restarts: Number of random restarts after the exhaustive small-support scan.
    :param steps: Local moves per restart.
    :param temperature: Initial annealing temperature (in units of s).
    :param cooling: Multiplicative temperature decay per move.
    :param weight_sweeps: Passes of pairwise weight transfers per candidate.
    :param seed: Master seed; restart k draws from ``SeedSequence([seed, k])``.
    :param budget_secs: Wall-time budget; ``None`` for no limit.
    """

    l_max: int = 2
    max_support: int = 4
    restarts: int = 4
    steps: int = 30
    temperature: float = 0.05
    cooling: float = 0.95
    weight_sweeps: int = 3
    seed: int = 0
    budget_secs: float = None

    def __post_init__(self):
        if self.l_max < 1:
            raise ValueError(f"l_max must be at least 1. {self.l_max} was given.")
        if self.max_support < 1:
            raise ValueError(f"max_support must be at least 1. {self.max_support} was given.")
        if self.restarts < 1:
            raise ValueError(f"restarts must be at least 1. {self.restarts} was given.")
        if self.steps < 0 or self.weight_sweeps < 1:
            raise ValueError("steps must be nonnegative and weight_sweeps positive.")
        if not 0 < self.cooling <= 1 or self.temperature < 0:
            raise ValueError(f"Invalid annealing schedule: temperature {self.temperature}, cooling {self.cooling}.")
        if self.budget_secs is not None and self.budget_secs <= 0:
            raise ValueError(f"budget_secs must be positive. {self.budget_secs} was given.")

    def replace(self, **changes):
        changes = {k: v for k, v in changes.items() if v is not None}
        return SearchConfig(**{**asdict(self), **changes})

    def to_dict(self):
        return asdict(self)


def load_search_config(path):
    """Reads a JSON search configuration; unknown keys are rejected."""
    data = read_json(path)
    known = {f.name for f in fields(SearchConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ValueError(f"Unknown search configuration keys: {', '.join(unknown)}.")
    return SearchConfig(**data)


# ---------------------------------------------------------------------------------------------
# Isotropic system


@dataclass(frozen=True)
class IsotropicSolution:
    """Weights and s with ``B(s) = 0`` on a fixed support."""

    support: tuple
    weights: tuple
    s: object
    exact: bool
    residual: float

    def measure(self, instance):
        """The measure on the atoms with positive weight."""
        pairs = [(l, w) for l, w in zip(self.support, self.weights) if w > 0]
        if self.exact:
            atoms = [Atom(l, w) for l, w in pairs]
        else:
            atoms = _rationalize([l for l, _ in pairs], [float(w) for _, w in pairs])
        return VeroneseMeasure(instance, atoms)


def _atom_tables(instance, support, exact=True):
    """Per-atom ``(rho vector, a matrix)`` with ``a_mm = lambda_m`` and ``a_ab = 3 rho_a rho_b``."""
    M = instance.M
    rhos, tables = [], []
    for l_vec in support:
        r = [rho(SpectralParams(n, l)) for n, l in zip(instance.factors, l_vec)]
        lam = [lambda_iso(SpectralParams(n, l)) for n, l in zip(instance.factors, l_vec)]
        a = [[lam[i] if i == j else 3 * r[i] * r[j] for j in range(M)] for i in range(M)]
        if not exact:
            r = [float(x) for x in r]
            a = [[float(x) for x in row] for row in a]
        rhos.append(r)
        tables.append(a)
    if exact:
        return rhos, tables
    return np.array(rhos, dtype=float), np.array(tables, dtype=float)


def _check_support(instance, support):
    support = [tuple(int(l) for l in l_vec) for l_vec in support]
    if not support:
        raise ValueError("The support must contain at least one atom.")
    if len(set(support)) != len(support):
        raise ValueError("The support contains duplicate atoms.")
    for l_vec in support:
        if len(l_vec) != instance.M or any(l < 0 for l in l_vec):
            raise ValueError(f"Atom {l_vec} does not fit the instance {instance.factors}.")
    for m in range(instance.M):
        if all(l_vec[m] == 0 for l_vec in support):
            raise ValueError(f"Coordinate m={m + 1} is zero on the whole support; no immersion exists.")
    return support


def _snap(x, tol):
    """Smallest-denominator rational within relative ``tol`` of ``x``, or None."""
    for cap in (10, 10 ** 2, 10 ** 3, 10 ** 4, 10 ** 6, 10 ** 8, 10 ** 10):
        f = Fraction(x).limit_denominator(cap)
        if abs(float(f) - x) <= tol * max(1.0, abs(x)):
            return f
    return None


def _exact_from_v(instance, support, v):
    """Solves ``A(beta) = v v^T``, ``G(beta) = v`` exactly; returns ``(weights, s)`` or None."""
    rhos, tables = _atom_tables(instance, support)
    M = instance.M
    K = len(support)
    rows, rhs = [], []
    for a in range(M):
        for b in range(a, M):
            rows.append([tables[k][a][b] for k in range(K)])
            rhs.append(v[a] * v[b])
    for a in range(M):
        rows.append([rhos[k][a] for k in range(K)])
        rhs.append(v[a])
    consistent, _, beta = solve_affine(rows, rhs)
    if not consistent or any(b < 0 for b in beta):
        return None
    s = sum(beta, Fraction(0))
    if s <= 0:
        return None
    weights = tuple(b / s for b in beta)
    return weights, s


def _isotropic_residuals(x, rhos, tables, scale):
    alpha, s = x[:-1], x[-1]
    G = alpha @ rhos
    A = np.tensordot(alpha, tables, axes=1)
    M = G.shape[0]
    iu = np.triu_indices(M)
    B = (s * np.outer(G, G) - A)[iu] / scale
    return np.append(B, alpha.sum() - 1.0)


def solve_isotropic_system(instance, support, seed=0, attempts=24, initial=None,
                           tol=DEFAULT_TOLERANCES):
    """Finds weights and s with ``s G G^T = A`` on a fixed support.

    A damped trust-region least-squares solve on ``(alpha, s)`` runs from ``initial`` and from
    seeded random interior points. A converged solution is snapped: ``v = s G`` is replaced by
    nearby rationals and ``A(beta) = v v^T, G(beta) = v`` is solved exactly for ``beta = s alpha``.
    The exact answer is returned only if it passes :func:`is_isotropic` exactly; otherwise the
    numeric answer is returned when its residual is at most ``feasibility``.

    :param instance: The product of spheres.
    :type instance: ProblemInstance
    :param support: Distinct level vectors.
    :type support: list
    :param initial: Optional starting weights aligned with ``support``.
    :type initial: sequence, optional
    :raises ValueError: If the support is empty, has duplicates, leaves a coordinate at zero, or
        is a single atom whose ``A`` is not a multiple of ``G G^T``.
    :return: The solution, or ``None`` when no solution was found (not a proof of nonexistence).
    :rtype: IsotropicSolution or None
    """
    support = _check_support(instance, support)
    K = len(support)
    if K == 1:
        # One atom: alpha = 1 and s = A_11 / G_1^2 must fit every entry
        rhos, tables = _atom_tables(instance, support)
        g0 = rhos[0][0]
        s = tables[0][0][0] / (g0 * g0)
        mu = VeroneseMeasure(instance, [Atom(support[0], 1)])
        if not is_isotropic(curvature_data(mu), s):
            raise ValueError(f"A single atom {support[0]} is never isotropic on {instance.factors}.")
        return IsotropicSolution(tuple(support), (Fraction(1),), s, True, 0.0)

    rhos, tables = _atom_tables(instance, support, exact=False)
    M = instance.M
    iu = np.triu_indices(M)
    scale = np.maximum(1.0, np.abs(tables).max(axis=0)[iu])
    rng = np.random.default_rng(seed)
    starts = []
    if initial is not None:
        starts.append(np.asarray(initial, dtype=float) / np.sum(initial))
    starts += list(rng.dirichlet(np.ones(K), size=attempts))

    best = None
    for k, alpha0 in enumerate(starts):
        G = alpha0 @ rhos
        A = np.tensordot(alpha0, tables, axes=1)
        s0 = float(A.sum() / max(np.outer(G, G).sum(), 1e-300))
        res = least_squares(_isotropic_residuals, np.append(alpha0, s0), args=(rhos, tables, scale),
                            bounds=(np.zeros(K + 1), np.append(np.ones(K), np.inf)), method="trf",
                            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
        residual = float(np.abs(res.fun).max())
        log.debug("Isotropic solve start %d: residual %.3e", k, residual)
        if best is None or residual < best[1]:
            best = (res.x, residual)
        if residual > tol.feasibility:
            continue
        alpha, s = res.x[:-1], res.x[-1]
        v_float = s * (alpha @ rhos)
        for snap_tol in (tol.snap, 1e3 * tol.snap):
            v = [_snap(x, snap_tol) for x in v_float]
            if any(x is None for x in v):
                continue
            exact = _exact_from_v(instance, support, v)
            if exact is None:
                continue
            weights, s_exact = exact
            atoms = [Atom(l, w) for l, w in zip(support, weights) if w > 0]
            mu = VeroneseMeasure(instance, atoms)
            if validate(mu)[0] and is_isotropic(curvature_data(mu), s_exact):
                return IsotropicSolution(tuple(support), weights, s_exact, True, 0.0)
        return IsotropicSolution(tuple(support), tuple(float(a) for a in alpha), float(s), False, residual)
    log.info("No isotropic solution on support %s (best residual %.3e)", support, best[1])
    return None


# ---------------------------------------------------------------------------------------------
# Search


@dataclass
class SearchResult:
    """Outcome of :func:`minimize_s`."""

    measure: VeroneseMeasure
    certificate: object
    incomplete: bool
    evaluations: int
    restarts_completed: int
    refined: bool

    @property
    def s(self):
        return self.certificate.s_star


class _Evaluator:
    """Numeric critical s of candidate (support, weights) pairs with cached atom tables."""

    def __init__(self, instance):
        self.instance = instance
        self.count = 0
        self._cache = {}

    def tables(self, l_vec):
        if l_vec not in self._cache:
            r, a = _atom_tables(self.instance, [l_vec], exact=False)
            self._cache[l_vec] = (r[0], a[0])
        return self._cache[l_vec]

    def s(self, support, weights):
        self.count += 1
        rhos = np.array([self.tables(l)[0] for l in support])
        tabs = np.array([self.tables(l)[1] for l in support])
        w = np.asarray(weights, dtype=float)
        G = w @ rhos
        if np.any(G <= 1e-14):
            return math.inf
        A = np.tensordot(w, tabs, axes=1)
        value, *_ = face_extremum(A, G, True, NUMERIC, len(G), DEFAULT_TOLERANCES.feasibility)
        return float(value)


def _candidate_ok(support, weights, l_max_seen):
    return (len(set(support)) == len(support)
            and all(w > 0 for w in weights)
            and abs(sum(weights) - 1.0) <= 1e-9
            and all(0 <= l <= l_max_seen for l_vec in support for l in l_vec))


def optimize_weights(evaluator, support, weights, sweeps=3):
    """Pairwise-transfer coordinate descent on the weights of a fixed support.

    Each step moves mass between two atoms, ``w_i = t (w_i + w_j)``, with ``t`` chosen by a
    bounded scalar minimization of the numeric critical s. Atoms whose weight drops below
    ``1e-12`` are removed.

    :return: ``(support, weights, s)``.
    """
    support = list(support)
    w = np.asarray(weights, dtype=float).copy()
    current = evaluator.s(support, w)
    for _ in range(sweeps):
        before = current
        for i, j in combinations(range(len(support)), 2):
            total = w[i] + w[j]
            if total <= 0:
                continue

            def objective(t, i=i, j=j, total=total):
                trial = w.copy()
                trial[i], trial[j] = t * total, (1.0 - t) * total
                return evaluator.s(support, trial)

            res = minimize_scalar(objective, bounds=(0.0, 1.0), method="bounded",
                                  options={"xatol": 1e-12})
            if res.fun < current:
                w[i], w[j] = res.x * total, (1.0 - res.x) * total
                current = float(res.fun)
        if before - current <= 1e-13:
            break
    keep = w > 1e-12
    if not keep.all():
        support = [l for l, k in zip(support, keep) if k]
        w = w[keep] / w[keep].sum()
        current = evaluator.s(support, w)
    return support, w, current


def _rationalize(support, weights):
    fr = [Fraction(float(x)).limit_denominator(10 ** 12) for x in weights]
    fr[-1] = 1 - sum(fr[:-1], Fraction(0))
    if fr[-1] <= 0:
        fr = [Fraction(1, len(fr))] * len(fr)
    return [Atom(tuple(l), w) for l, w in zip(support, fr)]


def _key(s, support):
    return (s, len(support), tuple(sorted(support)))


def _grid(instance, l_max):
    return [l for l in product(range(l_max + 1), repeat=instance.M) if any(l)]


def _local_move(rng, support, weights, grid, cfg):
    support = list(support)
    w = list(weights)
    moves = ["shift"]
    if len(support) < cfg.max_support:
        moves.append("add")
    if len(support) > 1:
        moves.append("remove")
    move = moves[rng.integers(len(moves))]
    if move == "add":
        free = [l for l in grid if l not in support]
        if not free:
            return support, w
        new = free[rng.integers(len(free))]
        t = 1.0 / (len(support) + 1)
        w = [x * (1.0 - t) for x in w] + [t]
        support.append(new)
    elif move == "remove":
        k = int(rng.integers(len(support)))
        del support[k]
        del w[k]
        total = sum(w)
        w = [x / total for x in w]
    else:
        k = int(rng.integers(len(support)))
        m = int(rng.integers(len(support[k])))
        step = 1 if rng.random() < 0.5 else -1
        l_vec = list(support[k])
        l_vec[m] = min(cfg.l_max, max(0, l_vec[m] + step))
        l_vec = tuple(l_vec)
        if any(l_vec) and l_vec not in support:
            support[k] = l_vec
    return support, w


class ResultsCache:
    """Best-known measures per instance, stored as measure files plus ``index.json``."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.index_path = self.directory / "index.json"

    def _index(self):
        if self.index_path.is_file():
            return read_json(self.index_path)
        return {}

    def get(self, instance):
        entry = self._index().get(instance.key)
        if entry is None:
            return None
        return load_measure(self.directory / entry["file"])

    def put(self, measure, s):
        """Stores ``measure`` if it improves on the cached s; returns True when written."""
        index = self._index()
        key = measure.instance.key
        if key in index and Fraction(index[key]["s"]) <= s:
            return False
        name = "measure_" + key.replace(",", "_") + ".json"
        save_measure(measure, self.directory / name)
        index[key] = {"file": name, "s": str(s)}
        write_json(index, self.index_path)
        return True


def minimize_s(instance, cfg=None, warm_start=None, cache_dir=None, log_progress=False):
    """Searches for a measure on ``instance`` with small critical s.

    :param instance: The product of spheres.
    :type instance: ProblemInstance
    :param cfg: The search settings; defaults to :class:`SearchConfig`.
    :type cfg: SearchConfig, optional
    :param warm_start: A measure whose s the result never exceeds.
    :type warm_start: VeroneseMeasure, optional
    :param cache_dir: Results cache directory; a cached measure acts as a warm start and an
        improved result is written back.
    :type cache_dir: str, optional
    :param log_progress: Raises progress messages from DEBUG to INFO.
    :type log_progress: bool, optional
    :return: The best measure with its exact certificate; ``incomplete`` is set when the time
        budget ran out.
    :rtype: SearchResult
    """
    cfg = cfg or SearchConfig()
    level = logging.INFO if log_progress else logging.DEBUG
    started = time.monotonic()
    evaluator = _Evaluator(instance)
    grid = _grid(instance, cfg.l_max)
    incomplete = False

    def out_of_time():
        return cfg.budget_secs is not None and time.monotonic() - started > cfg.budget_secs

    cache = ResultsCache(cache_dir) if cache_dir else None
    warm = [m for m in (warm_start, cache.get(instance) if cache else None) if m is not None]

    best = None  # (key, support, weights)

    def offer(support, weights, s, l_max=cfg.l_max):
        nonlocal best
        if not math.isfinite(s) or not _candidate_ok(support, weights, l_max):
            return
        key = _key(s, support)
        if best is None or key < best[0]:
            best = (key, list(support), np.asarray(weights, dtype=float))

    for mu in warm:
        if mu.instance != instance:
            raise ValueError(f"Warm start lives on {mu.instance.factors}, not {instance.factors}.")
        # Warm starts may use levels beyond the grid
        offer(mu.support, mu.weights_float(), evaluator.s(mu.support, mu.weights_float()),
              l_max=max(max(l_vec) for l_vec in mu.support))

    # Exhaustive scan of one- and two-atom supports
    log.log(level, "- Scanning %d one- and two-atom supports", len(grid) + len(grid) * (len(grid) - 1) // 2)
    for l_vec in grid:
        offer([l_vec], [1.0], evaluator.s([l_vec], [1.0]))
    if cfg.max_support >= 2:
        for pair in combinations(grid, 2):
            if out_of_time():
                incomplete = True
                break
            support, w, s = optimize_weights(evaluator, list(pair), [0.5, 0.5], cfg.weight_sweeps)
            offer(support, w, s)

    restarts_done = 0
    for idx in range(cfg.restarts):
        if incomplete or out_of_time():
            incomplete = True
            break
        log.log(level, "- Beginning restart #%d", idx + 1)
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, idx]))
        size = int(rng.integers(1, min(cfg.max_support, len(grid)) + 1))
        picks = rng.choice(len(grid), size=size, replace=False)
        support = [grid[int(p)] for p in sorted(picks)]
        support, w, s = optimize_weights(evaluator, support, rng.dirichlet(np.ones(size)), cfg.weight_sweeps)
        offer(support, w, s)
        temperature = cfg.temperature
        for _ in range(cfg.steps):
            if out_of_time():
                incomplete = True
                break
            cand_support, cand_w = _local_move(rng, support, w, grid, cfg)
            cand_support, cand_w, cand_s = optimize_weights(evaluator, cand_support, cand_w, cfg.weight_sweeps)
            if not _candidate_ok(cand_support, cand_w, cfg.l_max):
                continue
            offer(cand_support, cand_w, cand_s)
            if cand_s < s or (temperature > 0 and rng.random() < math.exp(-(cand_s - s) / temperature)):
                support, w, s = cand_support, cand_w, cand_s
            temperature *= cfg.cooling
        restarts_done += 1
        log.log(level, "- Restart #%d finished at s = %.12g (best %.12g)", idx + 1, s, best[0][0])

    if best is None:
        raise ValueError(f"No candidate measure found on {instance.factors}.")

    # Exact re-evaluation of the winner, then isotropic refinement on its support
    _, support, w = best
    measure = VeroneseMeasure(instance, _rationalize(support, w))
    certificate = critical_s(curvature_data(measure), mode="exact")
    for mu in warm:
        warm_cert = critical_s(curvature_data(mu), mode="exact")
        if warm_cert.s_star <= certificate.s_star:
            measure, certificate = mu, warm_cert
    refined = False
    try:
        solution = solve_isotropic_system(instance, measure.support, seed=cfg.seed,
                                          initial=measure.weights_float())
    except ValueError:
        solution = None
    if solution is not None and solution.exact:
        candidate = solution.measure(instance)
        cand_cert = critical_s(curvature_data(candidate), mode="exact")
        if cand_cert.s_star <= certificate.s_star:
            measure, certificate, refined = candidate, cand_cert, True
    ok, message = validate(measure)
    if not ok:
        raise ValueError(f"Search produced an invalid measure: {message}.")
    # The winner may be the caller's warm start; name a copy
    name = measure.name or f"min_s_{instance.key.replace(',', '_')}"
    measure = VeroneseMeasure(instance, measure.atoms, name=name, note=measure.note)
    if cache is not None:
        cache.put(measure, certificate.s_star)
    log.log(level, "- Search on %s finished: s = %s after %d evaluations", instance.factors,
            certificate.s_star, evaluator.count)
    return SearchResult(measure, certificate, incomplete, evaluator.count, restarts_done, refined)
