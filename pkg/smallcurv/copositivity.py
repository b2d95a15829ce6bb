# Copositivity, quadratic minimization over the standard simplex and the critical s of a
# tensor immersion.
#
# Both optimization problems are solved by enumerating the faces of the feasible polytope
# and solving the KKT stationarity system on each face:
#
#     [ 2 Q_S   -g_S ] [ U_S ]   [ 0 ]
#     [ g_S^T    0   ] [theta] = [ 1 ]
#
# For the simplex ``g = 1``; for the critical s ``g = G``. Supports are visited by size and
# then lexicographically, and only strict improvements replace the incumbent, which makes
# the reported maximizer the one with the smallest (then lexicographically smallest) support.

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.optimize import minimize

from .config import DEFAULT_TOLERANCES, FACE_ENUMERATION_CAP
from .exact_linalg import solve_affine
from .measure import CurvatureData, immersion_check

log = logging.getLogger(__name__)

EXACT = "exact"
NUMERIC = "numeric"


class ProblemSizeError(ValueError):
    """Raised when exact face enumeration is requested above the configured cap."""


@dataclass(frozen=True)
class CopositivityCertificate:
    """
    A class representing the critical s of a tensor immersion and its maximizing direction.

    :param s_star: The maximum of ``U^T A U`` over ``{U >= 0, G.U = 1}``.
    :param u_star: The maximizer, normalized by ``G.U = 1``.
    :param support: Indices where ``u_star > 0``.
    :param mode: ``'exact'`` or ``'numeric'``.
    :param certified: False when the value comes from numeric bisection above the face cap.
    """

    s_star: object
    u_star: tuple
    support: tuple
    mode: str
    certified: bool = True
    faces_visited: int = field(default=0, compare=False)

    def to_dict(self):
        if self.mode == EXACT:
            return {
                "s_star": str(self.s_star),
                "u_star": [str(u) for u in self.u_star],
                "support": list(self.support),
                "mode": self.mode,
                "certified": self.certified,
            }
        return {
            "s_star": float(self.s_star),
            "u_star": [float(u) for u in self.u_star],
            "support": list(self.support),
            "mode": self.mode,
            "certified": self.certified,
        }


def _is_exact_matrix(Q):
    return all(isinstance(x, (int, Fraction)) for row in Q for x in row)


def _resolve_mode(mode, *arrays):
    if mode == "auto":
        return EXACT if all(_is_exact_matrix(a) for a in arrays) else NUMERIC
    if mode not in (EXACT, NUMERIC):
        raise ValueError(f"mode must be 'exact', 'numeric' or 'auto'. '{mode}' was given.")
    return mode


def _check_cap(M, cap):
    if M > cap:
        raise ProblemSizeError(f"Face enumeration over {M} coordinates exceeds the cap of {cap} "
                               f"({2 ** M - 1} faces).")


def _quadratic(Q, U):
    return sum(Q[i][j] * U[i] * U[j] for i in range(len(U)) for j in range(len(U)) if U[i] and U[j])


def _face_exact(Q, g, S):
    k = len(S)
    rows = []
    for a in range(k):
        row = [2 * Fraction(Q[S[a]][S[b]]) for b in range(k)]
        row.append(-Fraction(g[S[a]]))
        rows.append(row)
    rows.append([Fraction(g[S[b]]) for b in range(k)] + [Fraction(0)])
    rhs = [Fraction(0)] * k + [Fraction(1)]
    consistent, _, x = solve_affine(rows, rhs)
    if not consistent:
        return None
    U_S = x[:k]
    # A degenerate face keeps its particular solution only if it is feasible
    if any(u < 0 for u in U_S):
        return None
    return U_S


def _face_numeric(Q, g, S, tol):
    k = len(S)
    K = np.zeros((k + 1, k + 1))
    idx = np.array(S)
    K[:k, :k] = 2.0 * Q[np.ix_(idx, idx)]
    K[:k, k] = -g[idx]
    K[k, :k] = g[idx]
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    x, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    scale = max(1.0, float(np.abs(K).max()))
    if np.abs(K @ x - rhs).max() > tol * scale:
        return None
    U_S = x[:k]
    if np.any(U_S < -tol):
        return None
    return np.clip(U_S, 0.0, None)


def face_extremum(Q, g, maximize, mode, cap, tol):
    """Enumerates faces of ``{U >= 0, g.U = 1}`` and returns ``(value, U, support, faces)``."""
    M = len(g)
    _check_cap(M, cap)
    if mode == NUMERIC:
        Qn = np.array(Q, dtype=float)
        gn = np.array(g, dtype=float)
    best_value, best_U, best_S = None, None, None
    faces = 0
    for size in range(1, M + 1):
        for S in combinations(range(M), size):
            faces += 1
            if mode == EXACT:
                U_S = _face_exact(Q, g, S)
                if U_S is None:
                    continue
                U = [Fraction(0)] * M
                for i, u in zip(S, U_S):
                    U[i] = u
                value = _quadratic(Q, U)
                better = best_value is None or (value > best_value if maximize else value < best_value)
            else:
                U_S = _face_numeric(Qn, gn, S, tol)
                if U_S is None:
                    continue
                U = np.zeros(M)
                U[list(S)] = U_S
                value = float(U @ Qn @ U)
                slack = 1e-13 * max(1.0, abs(value))
                better = best_value is None or (value > best_value + slack if maximize
                                                else value < best_value - slack)
            if better:
                best_value, best_U, best_S = value, U, S
    if best_value is None:
        raise ValueError("No feasible face found; the constraint vector must have a positive entry.")
    if mode == NUMERIC:
        best_U = [float(u) for u in best_U]
    support = tuple(i for i, u in enumerate(best_U) if u > 0)
    log.debug("Face enumeration over %d coordinates visited %d faces", M, faces)
    return best_value, tuple(best_U), support, faces


def simplex_quadratic_min(B, mode="auto", cap=FACE_ENUMERATION_CAP, tol=DEFAULT_TOLERANCES.feasibility):
    """Returns the global minimum of ``U^T B U`` over the standard simplex.

    :param B: A symmetric M x M matrix (Fractions for the exact path).
    :type B: list
    :param mode: ``'exact'``, ``'numeric'`` or ``'auto'`` (exact iff all entries are rational).
    :type mode: str, optional
    :param cap: Largest M for which face enumeration is allowed.
    :type cap: int, optional
    :raises ProblemSizeError: If M exceeds ``cap``.
    :return: ``(min value, argmin U)``.
    :rtype: tuple
    """
    B = _as_rows(B)
    mode = _resolve_mode(mode, B)
    ones = [Fraction(1)] * len(B) if mode == EXACT else [1.0] * len(B)
    value, U, _, _ = face_extremum(B, ones, False, mode, cap, tol)
    return value, U


def is_copositive(B, mode="auto", cap=FACE_ENUMERATION_CAP, tol=DEFAULT_TOLERANCES.feasibility):
    """Decides whether ``U^T B U >= 0`` for every ``U >= 0``.

    :return: ``(True, None)`` or ``(False, U)`` with a violating point of the simplex.
    :rtype: tuple
    """
    value, U = simplex_quadratic_min(B, mode, cap, tol)
    if value >= 0:
        return True, None
    return False, U


def _as_rows(B):
    if isinstance(B, np.ndarray):
        return B.tolist()
    return [list(row) for row in B]


def b_matrix(data, s):
    """Returns ``B(s) = s G G^T - A``."""
    M = data.M
    return [[s * data.G[a] * data.G[b] - data.A[a][b] for b in range(M)] for a in range(M)]


def is_isotropic(data, s, tol=0):
    """True iff ``s G G^T - A`` is the zero matrix (within ``tol`` for float data)."""
    B = b_matrix(data, s)
    return all(abs(x) <= tol for row in B for x in row)


def _numeric_simplex_min(B, starts=None, seed=0):
    """Multi-start SLSQP minimization of ``U^T B U`` over the simplex (no certificate)."""
    B = np.asarray(B, dtype=float)
    M = B.shape[0]
    rng = np.random.default_rng(seed)
    points = [np.eye(M)[i] for i in range(M)] + [np.full(M, 1.0 / M)]
    points += list(rng.dirichlet(np.ones(M), size=starts if starts is not None else 2 * M))
    constraint = {"type": "eq", "fun": lambda u: u.sum() - 1.0, "jac": lambda u: np.ones_like(u)}
    best_value, best_U = np.inf, None
    for x0 in points:
        res = minimize(lambda u: u @ B @ u, x0, jac=lambda u: 2.0 * B @ u, method="SLSQP",
                       bounds=[(0.0, 1.0)] * M, constraints=[constraint],
                       options={"ftol": 1e-15, "maxiter": 500})
        U = np.clip(res.x, 0.0, None)
        U /= U.sum()
        value = float(U @ B @ U)
        if value < best_value:
            best_value, best_U = value, U
    return best_value, best_U


def _bisection_bounds(A, G):
    # max_i A_ii/G_i^2 <= s* <= max_ij A_ij/(G_i G_j)
    M = len(G)
    lo = max(float(A[i][i]) / float(G[i]) ** 2 for i in range(M))
    hi = max(float(A[i][j]) / (float(G[i]) * float(G[j])) for i in range(M) for j in range(M))
    return lo, max(hi, lo)


def bisect_critical_s(data, tol=1e-10, oracle=None, max_iter=200):
    """Bisection on s with a copositivity oracle for ``B(s)``.

    :param data: Curvature data with ``G > 0``.
    :type data: CurvatureData
    :param tol: Width of the final bracket.
    :type tol: float, optional
    :param oracle: Callable ``B -> bool``; defaults to numeric face enumeration.
    :type oracle: callable, optional
    :return: ``(lo, hi)`` with ``B(lo)`` not copositive (or lo at its lower bound) and ``B(hi)`` copositive.
    :rtype: tuple
    """
    ok, m = immersion_check(data)
    if not ok:
        raise ValueError(f"G_{m + 1} = 0: the map is not an immersion.")
    if oracle is None:
        def oracle(B):
            return is_copositive(B, mode=NUMERIC)[0]
    A, G = data.as_arrays()
    lo, hi = _bisection_bounds(A, G)
    GG = np.outer(G, G)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if oracle(mid * GG - A):
            hi = mid
        else:
            lo = mid
    return lo, hi


def _critical_s_numeric_bisection(data, tol, seed):
    A, G = data.as_arrays()
    GG = np.outer(G, G)

    def oracle(B):
        return _numeric_simplex_min(B, seed=seed)[0] >= -tol

    lo, hi = bisect_critical_s(data, tol=tol, oracle=oracle)
    _, U = _numeric_simplex_min(lo * GG - A, seed=seed)
    U = U / float(G @ U)
    support = tuple(i for i, u in enumerate(U) if u > tol)
    log.warning("critical s over %d coordinates computed by numeric bisection; result is not certified", len(G))
    return CopositivityCertificate(hi, tuple(float(u) for u in U), support, NUMERIC, certified=False)


def critical_s(data, mode="auto", cap=FACE_ENUMERATION_CAP, tol=DEFAULT_TOLERANCES.feasibility, seed=0):
    """Computes ``s* = max U^T A U`` over ``{U >= 0, G.U = 1}``, the squared maximal normal curvature.

    Above the face-enumeration cap the value is bracketed by numeric bisection and the
    certificate is flagged ``certified=False``.

    :param data: The curvature data of a tensor immersion.
    :type data: CurvatureData
    :param mode: ``'exact'``, ``'numeric'`` or ``'auto'``.
    :type mode: str, optional
    :raises ValueError: If some ``G_m`` vanishes.
    :rtype: CopositivityCertificate
    """
    if not isinstance(data, CurvatureData):
        raise ValueError(f"critical_s expects CurvatureData. {type(data).__name__} was given.")
    ok, m = immersion_check(data)
    if not ok:
        raise ValueError(f"G_{m + 1} = 0: the map is not an immersion.")
    if data.M > cap:
        return _critical_s_numeric_bisection(data, tol, seed)
    A = [list(row) for row in data.A]
    G = list(data.G)
    mode = _resolve_mode(mode, A, [G])
    if mode == EXACT:
        A = [[Fraction(x) for x in row] for row in A]
        G = [Fraction(g) for g in G]
    value, U, support, faces = face_extremum(A, G, True, mode, cap, tol)
    return CopositivityCertificate(value, U, support, mode, certified=True, faces_visited=faces)
