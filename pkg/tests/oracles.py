"""Independent reference computations used only by the tests.

Nothing here calls into the capacity solver, the simplex, or the matching
recursion; each oracle takes a different route to the same quantity.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from capkit.poly import SparsePoly

GRID_LO, GRID_HI = -8.0, 8.0
GRID_POINTS = 60
GRID_REFINEMENTS = 2


def _log_objective(p: SparsePoly, alpha: Sequence[float]):
    exps = np.array(list(p.terms), dtype=float).reshape(len(p.terms), p.arity)
    logc = np.array([math.log(float(c)) for c in p.terms.values()])
    a = np.array([float(v) for v in alpha])

    def f(Y: np.ndarray) -> np.ndarray:
        # Y has shape (points, n)
        z = Y @ exps.T + logc
        top = z.max(axis=1, keepdims=True)
        return (top[:, 0] + np.log(np.exp(z - top).sum(axis=1))) - Y @ a

    return f


def grid_capacity(p: SparsePoly, alpha: Sequence, points: int = GRID_POINTS,
                  refinements: int = GRID_REFINEMENTS) -> float:
    """Grid search of ``p(x) / x^alpha`` over ``x`` log-uniform in ``[e^-8, e^8]^n``.

    After the coarse pass the grid is rebuilt twice around the best point, one
    coarse step to either side.  The result is an upper bound on the infimum.
    """
    n = p.arity
    f = _log_objective(p, alpha)
    lo = np.full(n, GRID_LO)
    hi = np.full(n, GRID_HI)
    best_y, best = None, math.inf
    for _ in range(refinements + 1):
        axes = [np.linspace(l, h, points) for l, h in zip(lo, hi)]
        Y = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
        vals = f(Y)
        i = int(np.argmin(vals))
        if vals[i] < best:
            best, best_y = float(vals[i]), Y[i]
        step = (hi - lo) / (points - 1)
        lo, hi = best_y - step, best_y + step
    return math.exp(best)


# -- convex hull by enumerating basic feasible solutions ----------------------

def _solve_exact(A: List[List[Fraction]], b: List[Fraction]) -> Optional[List[Fraction]]:
    """Unique solution of an overdetermined system with full column rank, else None."""
    rows, cols = len(A), len(A[0])
    M = [list(r) + [bi] for r, bi in zip(A, b)]
    r = 0
    pivots = []
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if piv is None:
            return None  # rank deficient: points are affinely dependent
        M[r], M[piv] = M[piv], M[r]
        pv = M[r][c]
        M[r] = [v / pv for v in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [vi - f * vr for vi, vr in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    if any(M[i][-1] != 0 for i in range(r, rows)):
        return None
    return [M[i][-1] for i in range(cols)]


def basic_representations(points: Sequence[Sequence[int]], alpha: Sequence):
    """Every affinely independent subset whose convex hull contains ``alpha``, with weights."""
    pts = sorted({tuple(p) for p in points})
    alpha = [Fraction(a) for a in alpha]
    n = len(alpha)
    out = []
    for size in range(1, min(n + 1, len(pts)) + 1):
        for subset in itertools.combinations(pts, size):
            A = [[Fraction(mu[k]) for mu in subset] for k in range(n)] + [[Fraction(1)] * size]
            w = _solve_exact(A, alpha + [Fraction(1)])
            if w is not None and all(v >= 0 for v in w):
                out.append((subset, w))
    return out


def hull_contains(points, alpha) -> bool:
    return bool(basic_representations(points, alpha))


def minimal_face(points, alpha) -> set:
    """Support points carrying positive weight in some convex representation of ``alpha``."""
    face = set()
    for subset, w in basic_representations(points, alpha):
        face |= {mu for mu, v in zip(subset, w) if v > 0}
    return face


# -- combinatorial brute force ------------------------------------------------

def brute_matchings(left: int, edges) -> List[int]:
    """Matching counts by trying every edge subset."""
    edges = sorted(edges)
    counts = [0] * (left + 1)
    for r in range(left + 1):
        for subset in itertools.combinations(edges, r):
            if len({e[0] for e in subset}) == r and len({e[1] for e in subset}) == r:
                counts[r] += 1
    return counts


def brute_permanent(rows):
    n = len(rows)
    total = 0
    for perm in itertools.permutations(range(n)):
        term = 1
        for i, j in enumerate(perm):
            term *= rows[i][j]
        total += term
    return total


def rook_numbers(n: int) -> List[int]:
    """Matchings of ``K_{n,n}``: ``binom(n, k)^2 k!``."""
    return [math.comb(n, k) ** 2 * math.factorial(k) for k in range(n + 1)]


def numpy_real_rooted(coeffs: Sequence, tol: float = 1e-7) -> bool:
    """Real-rootedness from the eigenvalue root finder (ascending coefficients)."""
    c = [float(v) for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    if len(c) <= 2:
        return True
    roots = np.roots(c[::-1])
    scale = max(1.0, float(np.max(np.abs(roots))))
    return bool(np.all(np.abs(roots.imag) <= tol * scale))
