"""Newton polytope membership by exact linear feasibility.

``alpha`` lies in ``Newt(p)`` iff the system ``sum_i w_i mu_i = alpha``,
``sum_i w_i = 1``, ``w >= 0`` is feasible.  The system is solved with a dense
tableau simplex over the rationals, using Dantzig pricing with a Bland
fallback on degenerate streaks so it cannot cycle.  Infeasibility yields a
Farkas certificate, which is turned into a separating direction.  When
feasible, a second direction (away from the barycentre of the support)
detects the relative interior in the same solve; otherwise the minimal face
is found by repeatedly maximising the weight on points not yet in the face.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .poly import Exponent, SparsePoly, to_fraction

INTERIOR = "interior"
BOUNDARY = "boundary"
OUTSIDE = "outside"


@dataclass(frozen=True)
class Membership:
    """Where ``alpha`` sits relative to ``Newt(p)``.

    ``interior`` means the relative interior: the minimal face containing
    ``alpha`` is the whole polytope.  For ``boundary`` the ``face`` holds every
    support point on the minimal face.  For ``outside``, ``separator`` is a
    direction ``c`` with ``c . mu >= c . alpha + margin`` for every support point.
    """

    status: str
    face: Tuple[Exponent, ...] = ()
    separator: Optional[Tuple[Fraction, ...]] = None
    margin: Optional[Fraction] = None
    weights: dict = field(default_factory=dict, compare=False)


# Dantzig's rule until this many degenerate pivots in a row, then Bland's rule
# (which cannot cycle) until the objective moves again.
DEGENERATE_STREAK = 20


class _Tableau:
    """min c.x  s.t.  A x = b, x >= 0, with b >= 0 (rows pre-flipped)."""

    def __init__(self, A: List[List[Fraction]], b: List[Fraction]):
        self.m = len(A)
        self.n = len(A[0]) if A else 0
        # columns: n structural, m artificial, then rhs
        self.rows = []
        for i, (row, bi) in enumerate(zip(A, b)):
            art = [Fraction(0)] * self.m
            art[i] = Fraction(1)
            self.rows.append(list(row) + art + [bi])
        self.basis = [self.n + i for i in range(self.m)]
        self.active = list(range(self.m))

    def _pivot(self, r: int, col: int) -> None:
        rows = self.rows
        piv = rows[r][col]
        pr = [v / piv for v in rows[r]]
        rows[r] = pr
        nz = [j for j, v in enumerate(pr) if v]
        for i in range(len(rows)):
            if i == r:
                continue
            f = rows[i][col]
            if f:
                row = rows[i]
                for j in nz:
                    row[j] -= f * pr[j]
        self.basis[r] = col

    def _reduced(self, cost: List[Fraction]) -> List[Fraction]:
        width = self.n + self.m
        z = list(cost) + [Fraction(0)]
        for i, bcol in enumerate(self.basis):
            cb = cost[bcol]
            if cb:
                row = self.rows[i]
                for j in range(width + 1):
                    if row[j]:
                        z[j] -= cb * row[j]
        return z

    def _run(self, cost: List[Fraction], allowed) -> Tuple[str, List[Fraction]]:
        z = self._reduced(cost)
        allowed = list(allowed)
        degenerate = 0
        while True:
            if degenerate < DEGENERATE_STREAK:
                enter = min(allowed, key=lambda j: z[j], default=None)
                if enter is not None and z[enter] >= 0:
                    enter = None
            else:
                enter = next((j for j in allowed if z[j] < 0), None)
            if enter is None:
                return "optimal", z
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded", z
            r = best[1]
            degenerate = degenerate + 1 if best[0][0] == 0 else 0
            self._pivot(r, enter)
            # update reduced costs by the same pivot
            f = z[enter]
            pr = self.rows[r]
            z = [zj - f * pj for zj, pj in zip(z, pr)]

    def solve(self, cost: Sequence[Fraction]):
        """Return ('infeasible', farkas_y) or (status, x)."""
        n, m = self.n, self.m
        phase1 = [Fraction(0)] * n + [Fraction(1)] * m
        _, z = self._run(phase1, range(n + m))
        if -z[-1] > 0:
            # Duals of the phase-I optimum: pi_i = 1 - reduced cost of artificial i.
            pi = [Fraction(1) - z[n + i] for i in range(m)]
            return "infeasible", pi
        self._drive_out_artificials()
        return self.reoptimize(cost)

    def reoptimize(self, cost: Sequence[Fraction]):
        """Phase II from the current feasible basis with a new cost."""
        n = self.n
        full_cost = list(cost) + [Fraction(0)] * self.m
        status, _ = self._run(full_cost, range(n))
        x = [Fraction(0)] * n
        for i, bcol in enumerate(self.basis):
            if bcol < n:
                x[bcol] = self.rows[i][-1]
        return status, x

    def _drive_out_artificials(self) -> None:
        keep = []
        for i in range(len(self.rows)):
            if self.basis[i] < self.n:
                keep.append(i)
                continue
            col = next((j for j in range(self.n) if self.rows[i][j]), None)
            if col is None:
                continue  # redundant row
            self._pivot(i, col)
            keep.append(i)
        self.rows = [self.rows[i] for i in keep]
        self.basis = [self.basis[i] for i in keep]


def _system(points: Sequence[Exponent], alpha: Sequence[Fraction], extra: Sequence = ()):
    n = len(alpha)
    # ``extra`` is one optional column, entering the first n rows negated
    A = [[Fraction(mu[k]) for mu in points] + ([-Fraction(extra[k])] if extra else [])
         for k in range(n)]
    A.append([Fraction(1)] * len(points) + [Fraction(0)] * (1 if extra else 0))
    b = list(alpha) + [Fraction(1)]
    signs = [1 if bi >= 0 else -1 for bi in b]
    A = [[s * v for v in row] for s, row in zip(signs, A)]
    b = [s * bi for s, bi in zip(signs, b)]
    return A, b, signs


def _lp(points, alpha, cost, extra=(), keep=False):
    A, b, signs = _system(points, alpha, extra)
    tab = _Tableau(A, b)
    status, out = tab.solve(cost)
    if status == "infeasible":
        out = [-s * v for s, v in zip(signs, out)]
    return (status, out, tab) if keep else (status, out)


def convex_weights(points: Sequence[Exponent], alpha: Sequence, cost: Sequence = None):
    """A convex combination of ``points`` hitting ``alpha`` (minimising ``cost``), or None."""
    alpha = [to_fraction(a) for a in alpha]
    cost = [Fraction(0)] * len(points) if cost is None else [Fraction(c) for c in cost]
    status, out = _lp(points, alpha, cost)
    if status == "infeasible":
        return None
    return out


def _univariate(points, a: Fraction) -> Membership:
    lo = min(p[0] for p in points)
    hi = max(p[0] for p in points)
    if a < lo or a > hi:
        if a < lo:
            return Membership(OUTSIDE, separator=(Fraction(1),), margin=lo - a)
        return Membership(OUTSIDE, separator=(Fraction(-1),), margin=a - hi)
    if lo == hi:
        return Membership(INTERIOR, face=tuple(points))
    if a == lo or a == hi:
        return Membership(BOUNDARY, face=tuple(p for p in points if p[0] == a))
    return Membership(INTERIOR, face=tuple(points))


def membership(points: Sequence[Sequence[int]], alpha: Sequence) -> Membership:
    """Locate ``alpha`` relative to the convex hull of ``points``."""
    points = sorted({tuple(int(v) for v in p) for p in points})
    if not points:
        raise ValueError("empty support")
    alpha = tuple(to_fraction(a) for a in alpha)
    n = len(alpha)
    if any(len(p) != n for p in points):
        raise ValueError("alpha length does not match arity")
    if n == 0:
        return Membership(INTERIOR, face=tuple(points))
    if n == 1:
        return _univariate(points, alpha[0])

    # One LP settles the common case: alpha is in the relative interior iff
    # it can be pushed a little further away from the barycentre.
    N = len(points)
    centre = tuple(sum(Fraction(mu[k]) for mu in points) / N for k in range(n))
    if centre == alpha:
        w = Fraction(1, N)
        return Membership(INTERIOR, face=tuple(points), weights={mu: w for mu in points})
    away = [a - c for a, c in zip(alpha, centre)]
    status, out, tab = _lp(points, alpha, [Fraction(0)] * N + [Fraction(-1)], extra=away, keep=True)
    if status == "infeasible":
        c, d = out[:n], out[n]
        # c.mu + d >= 0 for all mu, c.alpha + d < 0
        margin = -d - sum(ci * ai for ci, ai in zip(c, alpha))
        return Membership(OUTSIDE, separator=tuple(c), margin=margin)
    t = out[N]
    if t > 0:
        weights = {mu: (out[i] + t / N) / (1 + t) for i, mu in enumerate(points)}
        return Membership(INTERIOR, face=tuple(points), weights=weights)

    # t is 0 in every feasible solution now, so the same tableau is reused
    in_face = {i for i in range(N) if out[i] > 0}
    weights = {points[i]: out[i] for i in in_face}
    while len(in_face) < N:
        cost = [Fraction(0) if i in in_face else Fraction(-1) for i in range(N)] + [Fraction(0)]
        _, x = tab.reoptimize(cost)
        new = {i for i, w in enumerate(x) if w > 0} - in_face
        if not new:
            break
        in_face |= new
    face = tuple(points[i] for i in sorted(in_face))
    kind = INTERIOR if len(face) == N else BOUNDARY
    return Membership(kind, face=face, weights=weights)


def newton_membership(p: SparsePoly, alpha: Sequence) -> Membership:
    if p.is_zero():
        raise ValueError("newton_membership of the zero polynomial")
    if len(alpha) != p.arity:
        raise ValueError(f"alpha has length {len(alpha)}, expected {p.arity}")
    return membership(list(p.terms), alpha)
