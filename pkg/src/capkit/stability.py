"""Real-rootedness and sampled real-stability tests.

A polynomial is real stable iff every restriction ``t -> p(a + t b)`` with
``b > 0`` is real-rooted.  :func:`probabilistic_stability_test` samples such
lines; a failure is a proof of non-stability (confirmed in exact arithmetic),
a pass is only evidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Union

import numpy as np

from .poly import FLOAT, RATIONAL, SparsePoly
from .report import BoundReport

REAL_TOL = 1e-8
GRID = 1024

Coeffs = Sequence  # univariate coefficients, lowest degree first


# -- exact univariate helpers ----------------------------------------------

def _trim(c: List) -> List:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _derivative(c: List) -> List:
    return [k * c[k] for k in range(1, len(c))]


def _rem(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    a = list(a)
    db = len(b) - 1
    lead = b[-1]
    while len(a) - 1 >= db and a:
        f = a[-1] / lead
        shift = len(a) - 1 - db
        for i, bi in enumerate(b):
            a[shift + i] -= f * bi
        a = _trim(a)
    return a


def _gcd(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    while b:
        a, b = b, _rem(a, b)
    return [c / a[-1] for c in a]


def _quo(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    a = list(a)
    db = len(b) - 1
    q = [Fraction(0)] * (len(a) - db)
    while len(a) - 1 >= db and a:
        f = a[-1] / b[-1]
        shift = len(a) - 1 - db
        q[shift] = f
        for i, bi in enumerate(b):
            a[shift + i] -= f * bi
        a = _trim(a)
    return q


def sturm_sequence(c: Coeffs) -> List[List[Fraction]]:
    seq = [_trim([Fraction(v) for v in c])]
    seq.append(_derivative(seq[0]))
    while seq[-1]:
        r = _rem(seq[-2], seq[-1])
        seq.append([-v for v in r])
    return seq[:-1]


def _sign_changes(signs: List[int]) -> int:
    s = [v for v in signs if v]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def count_real_roots(c: Coeffs) -> int:
    """Number of distinct real roots, exactly, by Sturm's theorem."""
    seq = sturm_sequence(c)
    at_pos = [(1 if q[-1] > 0 else -1) for q in seq if q]
    at_neg = [((1 if q[-1] > 0 else -1) * (-1) ** (len(q) - 1)) for q in seq if q]
    return _sign_changes(at_neg) - _sign_changes(at_pos)


def is_real_rooted_exact(c: Coeffs) -> bool:
    c = _trim([Fraction(v) for v in c])
    if not c:
        raise ValueError("zero polynomial")
    k = next(i for i, v in enumerate(c) if v != 0)
    c = c[k:]
    if len(c) <= 2:
        return True
    squarefree = _quo(c, _gcd(c, _derivative(c)))
    return count_real_roots(squarefree) == len(squarefree) - 1


def is_real_rooted_float(c: Coeffs, tol: float = REAL_TOL) -> bool:
    c = _trim([float(v) for v in c])
    if not c:
        raise ValueError("zero polynomial")
    k = next(i for i, v in enumerate(c) if v != 0)
    c = c[k:]
    if len(c) <= 2:
        return True
    roots = np.roots(c[::-1])
    return bool(np.all(np.abs(roots.imag) <= tol * (1.0 + np.abs(roots.real))))


def _coeff_list(u: Union[SparsePoly, Coeffs]) -> List:
    if isinstance(u, SparsePoly):
        if u.arity != 1:
            raise ValueError("is_real_rooted expects a univariate polynomial")
        deg = u.total_degree()
        return [u.coef((k,)) for k in range(deg + 1)]
    return list(u)


def is_real_rooted(u: Union[SparsePoly, Coeffs], mode: Optional[str] = None,
                   tol: float = REAL_TOL) -> bool:
    """All roots real?  Rational input uses Sturm sequences, float uses eigenvalues.

    ``u`` may be a univariate :class:`SparsePoly` or a coefficient list (lowest
    degree first, signs unrestricted).
    """
    c = _coeff_list(u)
    if mode is None:
        if isinstance(u, SparsePoly):
            mode = u.mode
        else:
            mode = RATIONAL if all(isinstance(v, (int, Fraction)) for v in c) else FLOAT
    if mode == RATIONAL:
        return is_real_rooted_exact(c)
    return is_real_rooted_float(c, tol)


# -- line restrictions -----------------------------------------------------

def _poly_mul(u: List, v: List) -> List:
    out = [0] * (len(u) + len(v) - 1)
    for i, a in enumerate(u):
        if a:
            for j, b in enumerate(v):
                out[i + j] += a * b
    return out


def _restrict_exact(p: SparsePoly, a: Sequence[Fraction], b: Sequence[Fraction]) -> List[Fraction]:
    # Clear denominators so the expansion runs on Python ints:
    # a = A/G, b = B/G, coefficients c = C/D, then rescale once at the end.
    G = math.lcm(*(Fraction(v).denominator for v in list(a) + list(b)))
    A = [int(Fraction(v) * G) for v in a]
    B = [int(Fraction(v) * G) for v in b]
    D = math.lcm(*(Fraction(c).denominator for c in p.terms.values()))
    deg = p.total_degree()
    out = [0] * (deg + 1)
    powers = {}
    for e, c in p.terms.items():
        poly = [int(Fraction(c) * D) * G ** (deg - sum(e))]
        for k, d in enumerate(e):
            if d:
                key = (k, d)
                if key not in powers:
                    f = [1]
                    for _ in range(d):
                        f = _poly_mul(f, [A[k], B[k]])
                    powers[key] = f
                poly = _poly_mul(poly, powers[key])
        for i, v in enumerate(poly):
            out[i] += v
    scale = D * G ** deg
    return [Fraction(v, scale) for v in out]


def restrict_to_line(p: SparsePoly, a: Sequence, b: Sequence) -> List:
    """Coefficients of ``t -> p(a + t b)``; exact when all inputs are rational."""
    exact = p.mode == RATIONAL and all(isinstance(v, (int, Fraction)) for v in list(a) + list(b))
    if exact:
        return _restrict_exact(p, a, b)
    deg = p.total_degree()
    out = [0.0] * (deg + 1)
    powers = {}
    for e, c in p.terms.items():
        poly = [float(c)]
        for k, d in enumerate(e):
            if d:
                key = (k, d)
                if key not in powers:
                    f = [1.0]
                    for _ in range(d):
                        f = _poly_mul(f, [float(a[k]), float(b[k])])
                    powers[key] = f
                poly = _poly_mul(poly, powers[key])
        for i, v in enumerate(poly):
            out[i] += v
    return out


@dataclass(frozen=True)
class StabilityVerdict:
    passed: bool
    trials: int
    line: Optional[tuple] = None  # (a, b) of a falsifying restriction
    restriction: Optional[list] = field(default=None, compare=False)

    @property
    def outcome(self) -> str:
        return "passed_trials" if self.passed else "falsified_at"

    def to_dict(self) -> dict:
        out = {"outcome": self.outcome, "trials": self.trials}
        if self.line is not None:
            out["line"] = {"a": [float(v) for v in self.line[0]],
                           "b": [float(v) for v in self.line[1]]}
        return out


def probabilistic_stability_test(p: SparsePoly, trials: int = 200, seed: int = 0) -> StabilityVerdict:
    """Sample lines ``a + t b`` (``a`` in [-3, 3]^n, ``b`` in (0.1, 3]^n) and test real-rootedness.

    Coordinates are rounded to multiples of 1/1024.

    Every trial draws from its own child stream of ``seed``.  Float screening
    is followed by an exact Sturm check on the same (exactly representable)
    line before a counterexample is reported.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = p.arity
    if n == 0 or p.total_degree() <= 1:
        return StabilityVerdict(True, trials)
    exact_p = p.to_rational()
    children = np.random.SeedSequence(seed).spawn(trials)
    for child in children:
        rng = np.random.default_rng(child)
        # dyadic grid: exact confirmation then works with small denominators
        a = np.round(rng.uniform(-3.0, 3.0, size=n) * GRID) / GRID
        b = np.ceil((3.0 - rng.uniform(0.0, 2.9, size=n)) * GRID) / GRID
        c = restrict_to_line(p.to_float(), list(a), list(b))
        if not any(c):
            continue
        if is_real_rooted_float(c):
            continue
        aq = [Fraction(v) for v in a]
        bq = [Fraction(v) for v in b]
        cq = restrict_to_line(exact_p, aq, bq)
        if any(cq) and not is_real_rooted_exact(cq):
            return StabilityVerdict(False, trials, (tuple(a), tuple(b)), cq)
    return StabilityVerdict(True, trials)


def strong_rayleigh_check(p: SparsePoly, i: int, j: int, points: Sequence[Sequence],
                          tol: float = 1e-9) -> BoundReport:
    """Minimum over ``points`` of ``(d_i p)(d_j p) - p (d_i d_j p)``."""
    from .poly import evaluate, partial_derivative

    if not p.is_multiaffine():
        raise ValueError("strong Rayleigh check needs a multiaffine polynomial")
    if i == j:
        raise ValueError("i and j must differ")
    di = partial_derivative(p, i)
    dj = partial_derivative(p, j)
    dij = partial_derivative(di, j)
    worst = None
    for x in points:
        lhs = evaluate(di, x) * evaluate(dj, x)
        rhs = evaluate(p, x) * evaluate(dij, x)
        if worst is None or lhs - rhs < worst[0] - worst[1]:
            worst = (lhs, rhs, tuple(x))
    if worst is None:
        raise ValueError("no points given")
    lhs, rhs, x = worst
    return BoundReport.inequality(float(lhs), float(rhs), tol=tol, absolute=True,
                                  context=f"strong Rayleigh (i={i}, j={j}) at {tuple(float(v) for v in x)}",
                                  tag="strong-rayleigh", exact_slack=lhs - rhs)
