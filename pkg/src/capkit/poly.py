"""Sparse multivariate polynomials with nonnegative coefficients.

A polynomial is a mapping from exponent tuples to coefficients.  Two numeric
modes are supported: ``"rational"`` (coefficients are :class:`fractions.Fraction`)
and ``"float"``.  Algebraic identities are checked in rational mode; capacity is
computed in floating point.  Mixing the two in arithmetic promotes to float,
never the other way.

Example (arity 2)::

    x0^2 * x1 + 3  ->  {(2, 1): Fraction(1), (0, 0): Fraction(3)}
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from numbers import Rational
from typing import Callable, Dict, Iterable, Mapping, Sequence, Tuple, Union

Exponent = Tuple[int, ...]
Number = Union[int, Fraction, float]

RATIONAL = "rational"
FLOAT = "float"


def _is_exact(c) -> bool:
    return isinstance(c, Rational) and not isinstance(c, bool)


def to_fraction(x: Number, max_den: int = 10**6) -> Fraction:
    """Convert a scalar to a Fraction.

    Floats that sit within 1e-12 (relative) of a rational with denominator at
    most ``max_den`` are snapped to it, so ``1/3`` typed as a float still lands
    exactly on the hyperplane it was meant for.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    xf = float(x)
    if not math.isfinite(xf):
        raise ValueError(f"non-finite value {x!r}")
    exact = Fraction(xf)
    snapped = exact.limit_denominator(max_den)
    if abs(float(snapped) - xf) <= 1e-12 * max(1.0, abs(xf)):
        return snapped
    return exact


def binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def multi_binom(lam: Sequence[int], mu: Sequence[int]) -> int:
    out = 1
    for l, m in zip(lam, mu):
        out *= math.comb(l, m)
    return out


def multi_factorial(mu: Sequence[int]) -> int:
    out = 1
    for m in mu:
        out *= math.factorial(m)
    return out


def elementary_symmetric(values: Sequence, k: int):
    """e_k of ``values`` via the standard O(n k) recurrence."""
    e = [1] + [0] * k
    for v in values:
        for j in range(k, 0, -1):
            e[j] = e[j] + e[j - 1] * v
    return e[k]


class SparsePoly:
    """Immutable sparse polynomial in ``arity`` variables, coefficients >= 0."""

    __slots__ = ("arity", "terms", "mode")

    def __init__(self, arity: int, terms: Mapping[Sequence[int], Number] | None = None,
                 mode: str | None = None):
        if arity < 0:
            raise ValueError("arity must be nonnegative")
        clean: Dict[Exponent, Number] = {}
        exact = True
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != arity:
                raise ValueError(f"exponent {exp} has length {len(exp)}, expected {arity}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            if c < 0:
                raise ValueError(f"negative coefficient {c} at {exp}")
            if c == 0:
                continue
            if not _is_exact(c):
                exact = False
            clean[exp] = clean.get(exp, 0) + c
        if mode is None:
            mode = RATIONAL if exact else FLOAT
        if mode == RATIONAL:
            if not exact:
                raise TypeError("float coefficient in rational-mode polynomial; use to_float()")
            clean = {e: Fraction(c) for e, c in clean.items()}
        elif mode == FLOAT:
            clean = {e: float(c) for e, c in clean.items()}
            clean = {e: c for e, c in clean.items() if c != 0.0}
        else:
            raise ValueError(f"unknown mode {mode!r}")
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "mode", mode)

    def __setattr__(self, name, value):
        raise AttributeError("SparsePoly is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, arity: int, mode: str = RATIONAL) -> "SparsePoly":
        return cls(arity, {}, mode)

    @classmethod
    def constant(cls, arity: int, c: Number) -> "SparsePoly":
        return cls(arity, {(0,) * arity: c})

    @classmethod
    def variable(cls, arity: int, k: int) -> "SparsePoly":
        _check_index(arity, k)
        exp = [0] * arity
        exp[k] = 1
        return cls(arity, {tuple(exp): 1})

    @classmethod
    def monomial(cls, exp: Sequence[int], c: Number = 1) -> "SparsePoly":
        return cls(len(exp), {tuple(exp): c})

    @classmethod
    def linear_form(cls, coeffs: Sequence[Number], const: Number = 0) -> "SparsePoly":
        """``const + sum_k coeffs[k] x_k``."""
        n = len(coeffs)
        terms: Dict[Exponent, Number] = {(0,) * n: const}
        for k, c in enumerate(coeffs):
            e = [0] * n
            e[k] = 1
            terms[tuple(e)] = c
        return cls(n, terms)

    @classmethod
    def univariate(cls, coeffs: Sequence[Number]) -> "SparsePoly":
        """From a coefficient list, lowest degree first."""
        return cls(1, {(k,): c for k, c in enumerate(coeffs)})

    # -- basic queries ------------------------------------------------------

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def is_zero(self) -> bool:
        return not self.terms

    def coef(self, exp: Sequence[int]) -> Number:
        return self.terms.get(tuple(exp), Fraction(0) if self.mode == RATIONAL else 0.0)

    def support(self) -> list[Exponent]:
        return sorted(self.terms)

    def degrees(self) -> Exponent:
        """Per-variable maximum degree."""
        if not self.terms:
            return (0,) * self.arity
        return tuple(max(e[k] for e in self.terms) for k in range(self.arity))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_multiaffine(self) -> bool:
        return all(max(e, default=0) <= 1 for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def is_symmetric(self) -> bool:
        for e, c in self.terms.items():
            for s in set(itertools.permutations(e)):
                if self.terms.get(s) != c:
                    return False
        return True

    def to_float(self) -> "SparsePoly":
        if self.mode == FLOAT:
            return self
        return SparsePoly(self.arity, {e: float(c) for e, c in self.terms.items()}, FLOAT)

    def to_rational(self) -> "SparsePoly":
        """Exact conversion: each double becomes the Fraction it represents."""
        if self.mode == RATIONAL:
            return self
        return SparsePoly(self.arity, {e: Fraction(c) for e, c in self.terms.items()}, RATIONAL)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other: "SparsePoly") -> str:
        if not isinstance(other, SparsePoly):
            raise TypeError(f"cannot combine SparsePoly with {type(other).__name__}")
        if other.arity != self.arity:
            raise ValueError(f"arity mismatch: {self.arity} vs {other.arity}")
        return FLOAT if FLOAT in (self.mode, other.mode) else RATIONAL

    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            if other == 0:
                return self
            other = SparsePoly.constant(self.arity, other)
        mode = self._coerce(other)
        out: Dict[Exponent, Number] = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return SparsePoly(self.arity, out, mode)

    __radd__ = __add__

    def __mul__(self, other):
        if not isinstance(other, SparsePoly):
            if other < 0:
                raise ValueError("negative scalar")
            mode = FLOAT if (self.mode == FLOAT or not _is_exact(other)) else RATIONAL
            return SparsePoly(self.arity, {e: c * other for e, c in self.terms.items()}, mode)
        mode = self._coerce(other)
        out: Dict[Exponent, Number] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(a + b for a, b in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return SparsePoly(self.arity, out, mode)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = SparsePoly.constant(self.arity, 1)
        if self.mode == FLOAT:
            result = result.to_float()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.arity == other.arity and self.terms == other.terms

    def __hash__(self):
        return hash((self.arity, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return f"SparsePoly({self.arity}, 0)"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e]
            mono = "*".join(f"x{k}^{d}" if d > 1 else f"x{k}" for k, d in enumerate(e) if d)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return f"SparsePoly({self.arity}, {' + '.join(parts)})"

    # -- evaluation ---------------------------------------------------------

    def __call__(self, x: Sequence[Number]):
        return evaluate(self, x)

    def map_terms(self, fn: Callable[[Exponent, Number], Iterable[Tuple[Exponent, Number]]],
                  arity: int | None = None) -> "SparsePoly":
        """Rebuild from ``fn(exp, coef) -> iterable of (exp, coef)`` pieces."""
        out: Dict[Exponent, Number] = {}
        for e, c in self.terms.items():
            for e2, c2 in fn(e, c):
                out[e2] = out.get(e2, 0) + c2
        return SparsePoly(self.arity if arity is None else arity, out, self.mode)


def _check_index(arity: int, k: int) -> None:
    if not 0 <= k < arity:
        raise IndexError(f"variable index {k} out of range for arity {arity}")


def _check_profile(p: SparsePoly, lam: Sequence[int]) -> Tuple[int, ...]:
    lam = tuple(int(l) for l in lam)
    if len(lam) != p.arity:
        raise ValueError(f"degree profile has length {len(lam)}, expected {p.arity}")
    if any(l < 0 for l in lam):
        raise ValueError("degree profile entries must be nonnegative")
    for d, l in zip(p.degrees(), lam):
        if d > l:
            raise ValueError(f"polynomial degree {p.degrees()} exceeds profile {lam}")
    return lam


def evaluate(p: SparsePoly, x: Sequence[Number]):
    """Sum of ``p_mu x^mu``.  Exact when ``p`` is rational and ``x`` is rational."""
    if len(x) != p.arity:
        raise ValueError(f"point has length {len(x)}, expected {p.arity}")
    total = Fraction(0) if p.mode == RATIONAL else 0.0
    for e, c in p.terms.items():
        term = c
        for xi, d in zip(x, e):
            if d:
                term = term * xi ** d
        total = total + term
    return total


def partial_derivative(p: SparsePoly, k: int) -> SparsePoly:
    _check_index(p.arity, k)

    def piece(e, c):
        if e[k]:
            e2 = list(e)
            e2[k] -= 1
            yield tuple(e2), c * e[k]

    return p.map_terms(piece)


def substitute(p: SparsePoly, k: int, value: Number) -> SparsePoly:
    """Fix variable ``k`` to ``value``; the result has arity one less."""
    _check_index(p.arity, k)
    if value < 0:
        raise ValueError("substituted value must be nonnegative")
    if p.mode == FLOAT:
        value = float(value)

    def piece(e, c):
        yield e[:k] + e[k + 1:], c * value ** e[k]

    return p.map_terms(piece, arity=p.arity - 1)


def scale_variables(p: SparsePoly, scale: Sequence[Number]) -> SparsePoly:
    """``p(c_1 x_1, ..., c_n x_n)``."""
    if len(scale) != p.arity:
        raise ValueError("scale vector length mismatch")
    if any(s < 0 for s in scale):
        raise ValueError("scale factors must be nonnegative")

    def piece(e, c):
        for s, d in zip(scale, e):
            c = c * s ** d
        yield e, c

    out = p.map_terms(piece) if p.mode == RATIONAL and all(_is_exact(s) for s in scale) \
        else p.to_float().map_terms(piece)
    return out


def diagonal(p: SparsePoly) -> SparsePoly:
    """``p(x, ..., x)`` as a univariate polynomial."""
    return p.map_terms(lambda e, c: [((sum(e),), c)], arity=1)


def tensor(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    """``p(x) q(z)`` in disjoint variable sets (x first)."""
    mode = FLOAT if FLOAT in (p.mode, q.mode) else RATIONAL
    out: Dict[Exponent, Number] = {}
    for ea, ca in p.terms.items():
        for eb, cb in q.terms.items():
            out[ea + eb] = ca * cb
    return SparsePoly(p.arity + q.arity, out, mode)


def restrict(p: SparsePoly, support: Iterable[Sequence[int]]) -> SparsePoly:
    keep = {tuple(e) for e in support}
    return SparsePoly(p.arity, {e: c for e, c in p.terms.items() if e in keep}, p.mode)


def homogenize(p: SparsePoly, lam: Sequence[int]) -> SparsePoly:
    """Two-sided homogenization: ``p_mu x^mu y^(lam - mu)`` in ``2n`` variables."""
    lam = _check_profile(p, lam)
    return p.map_terms(
        lambda e, c: [(e + tuple(l - d for l, d in zip(lam, e)), c)],
        arity=2 * p.arity,
    )


def invert(p: SparsePoly, lam: Sequence[int]) -> SparsePoly:
    """``x^lam p(1/x_1, ..., 1/x_n)``."""
    lam = _check_profile(p, lam)
    return p.map_terms(lambda e, c: [(tuple(l - d for l, d in zip(lam, e)), c)])


def polarize(p: SparsePoly, lam: Sequence[int]) -> SparsePoly:
    """Symmetric multiaffine lift, one block of ``lam[k]`` variables per ``x_k``.

    ``x_k^j`` becomes ``e_j(block_k) / binom(lam_k, j)``.  Blocks are laid out
    consecutively, so the output variable for copy ``i`` of ``x_k`` has index
    ``sum(lam[:k]) + i``.
    """
    lam = _check_profile(p, lam)
    offsets = [sum(lam[:k]) for k in range(p.arity)]
    width = sum(lam)
    subsets = {}

    def block_subsets(k, j):
        key = (k, j)
        if key not in subsets:
            subsets[key] = list(itertools.combinations(range(offsets[k], offsets[k] + lam[k]), j))
        return subsets[key]

    def piece(e, c):
        weight = multi_binom(lam, e)
        c = c / weight if p.mode == FLOAT else Fraction(c) / weight
        for choice in itertools.product(*(block_subsets(k, e[k]) for k in range(p.arity))):
            exp = [0] * width
            for idxs in choice:
                for i in idxs:
                    exp[i] = 1
            yield tuple(exp), c

    return p.map_terms(piece, arity=width)


def polarize_vector(alpha: Sequence[Number], lam: Sequence[int]) -> list:
    """``alpha_k / lam_k`` repeated ``lam_k`` times."""
    out = []
    for a, l in zip(alpha, lam):
        if l == 0:
            if a != 0:
                raise ValueError("nonzero alpha on a zero-degree block")
            continue
        val = Fraction(a) / l if _is_exact(a) else a / l
        out.extend([val] * l)
    return out


def diagonalize_blocks(p: SparsePoly, lam: Sequence[int]) -> SparsePoly:
    """Inverse of the block layout used by :func:`polarize`: identify each block's variables."""
    if sum(lam) != p.arity:
        raise ValueError("block sizes do not sum to arity")
    bounds = list(itertools.accumulate([0] + list(lam)))

    def piece(e, c):
        yield tuple(sum(e[bounds[k]:bounds[k + 1]]) for k in range(len(lam))), c

    return p.map_terms(piece, arity=len(lam))


def symmetrize(p: SparsePoly) -> SparsePoly:
    """Average over all permutations of the variables."""

    def piece(e, c):
        orbit = set(itertools.permutations(e))
        share = c / len(orbit) if p.mode == FLOAT else Fraction(c) / len(orbit)
        for o in orbit:
            yield o, share

    return p.map_terms(piece)


def permute_variables(p: SparsePoly, perm: Sequence[int]) -> SparsePoly:
    """``p(x_perm[0], ..., x_perm[n-1])``."""
    if sorted(perm) != list(range(p.arity)):
        raise ValueError("not a permutation")

    def piece(e, c):
        out = [0] * p.arity
        for i, j in enumerate(perm):
            out[j] += e[i]
        yield tuple(out), c

    return p.map_terms(piece)


def product(polys: Iterable[SparsePoly]) -> SparsePoly:
    polys = list(polys)
    if not polys:
        raise ValueError("empty product")
    out = polys[0]
    for q in polys[1:]:
        out = out * q
    return out
