"""Matrices, bipartite graphs, matchings, permanents and the capacity lower bounds on them.

``p_M(x) = prod_i sum_j m_ij x_j`` ties everything together: its mixed
derivative at 0 is the permanent, and ``sum_{|S|=k} d^S p_M (1)`` counts
k-matchings of a biregular graph up to a power of the left degree.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import poly as P
from .capacity import cpc
from .operators import (apply, bounded_factor, derivative_at_zero, matching_operator,
                        symbol_bounded)
from .poly import RATIONAL, SparsePoly
from .report import BoundReport
from .stability import StabilityVerdict, probabilistic_stability_test

STOCHASTIC_TOL = 1e-12
CAPACITY_EQ_TOL = 1e-6


@dataclass(frozen=True)
class NonnegMatrix:
    entries: Tuple[Tuple, ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        if not rows or not rows[0]:
            raise ValueError("matrix must be nonempty")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        if any(v < 0 for r in rows for v in r):
            raise ValueError("matrix entries must be nonnegative")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "NonnegMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def uniform(cls, n: int, value=None) -> "NonnegMatrix":
        v = Fraction(1, n) if value is None else value
        return cls(tuple((v,) * n for _ in range(n)))

    @classmethod
    def identity(cls, n: int) -> "NonnegMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    @property
    def row_sums(self) -> list:
        return [sum(r) for r in self.entries]

    @property
    def col_sums(self) -> list:
        return [sum(col) for col in zip(*self.entries)]

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for r in self.entries for v in r)

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.entries])

    def is_ab_stochastic(self, a, b, tol: float = STOCHASTIC_TOL) -> bool:
        return all(abs(s - a) <= tol for s in self.row_sums) and \
            all(abs(s - b) <= tol for s in self.col_sums)

    def is_doubly_stochastic(self, tol: float = STOCHASTIC_TOL) -> bool:
        m, n = self.shape
        return m == n and self.is_ab_stochastic(1, 1, tol)


@dataclass(frozen=True)
class BipartiteGraph:
    left: int
    right: int
    edges: frozenset = field(default_factory=frozenset)
    biregular: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        edges = frozenset((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if not (0 <= i < self.left and 0 <= j < self.right):
                raise ValueError(f"edge {(i, j)} out of range")
        object.__setattr__(self, "edges", edges)
        if self.biregular is not None:
            a, b = self.biregular
            if a * self.left != b * self.right:
                raise ValueError("biregular graph needs a*m == b*n")
            if any(d != a for d in self.left_degrees()) or any(d != b for d in self.right_degrees()):
                raise ValueError(f"graph is not ({a},{b})-biregular")

    @classmethod
    def complete(cls, m: int, n: int) -> "BipartiteGraph":
        return cls(m, n, frozenset((i, j) for i in range(m) for j in range(n)), (n, m))

    def neighbours(self, i: int) -> List[int]:
        return sorted(j for (u, j) in self.edges if u == i)

    def left_degrees(self) -> List[int]:
        return [sum(1 for (u, _) in self.edges if u == i) for i in range(self.left)]

    def right_degrees(self) -> List[int]:
        return [sum(1 for (_, v) in self.edges if v == j) for j in range(self.right)]

    def degrees(self) -> Tuple[int, int]:
        """``(a, b)`` if biregular, else ValueError."""
        if self.biregular is not None:
            return self.biregular
        ld, rd = set(self.left_degrees()), set(self.right_degrees())
        if len(ld) != 1 or len(rd) != 1:
            raise ValueError("graph is not biregular")
        return ld.pop(), rd.pop()

    def matrix(self) -> NonnegMatrix:
        return NonnegMatrix(tuple(tuple(int((i, j) in self.edges) for j in range(self.right))
                                  for i in range(self.left)))

    def without_edge(self, e) -> "BipartiteGraph":
        return BipartiteGraph(self.left, self.right, self.edges - {tuple(e)})

    def without_vertices(self, i: int, j: int) -> "BipartiteGraph":
        """Drop every edge at left vertex ``i`` and right vertex ``j`` (vertices kept, isolated)."""
        return BipartiteGraph(self.left, self.right,
                              frozenset((u, v) for (u, v) in self.edges if u != i and v != j))

    def to_json(self) -> dict:
        return {"left": self.left, "right": self.right, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json(cls, data: dict) -> "BipartiteGraph":
        from .io import graph_from_json

        m, n, edges = graph_from_json(data)
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edge")
        return cls(m, n, frozenset(edges))


def product_polynomial(M: NonnegMatrix) -> SparsePoly:
    """``prod_i sum_j m_ij x_j`` by iterated sparse multiplication; zero row gives 0."""
    m, n = M.shape
    p = SparsePoly.constant(n, 1 if M.exact else 1.0)
    for row in M.entries:
        if not any(row):
            return SparsePoly.zero(n, p.mode)
        p = p * SparsePoly.linear_form(list(row))
    return p


def sinkhorn(A, tol: float = 1e-14, max_iter: int = 100_000) -> NonnegMatrix:
    """Alternate row and column normalisation of a positive matrix."""
    X = np.array(A, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError("sinkhorn needs a square matrix")
    if np.any(X < 0) or np.any(X.sum(axis=0) == 0) or np.any(X.sum(axis=1) == 0):
        raise ValueError("sinkhorn needs nonnegative entries and no zero lines")
    for _ in range(max_iter):
        X /= X.sum(axis=1, keepdims=True)
        X /= X.sum(axis=0, keepdims=True)
        if np.max(np.abs(X.sum(axis=1) - 1.0)) <= tol:
            break
    else:
        raise RuntimeError("sinkhorn did not converge")
    return NonnegMatrix.from_rows(X.tolist())


def doubly_stochastic_capacity_check(M: NonnegMatrix, tol: float = CAPACITY_EQ_TOL) -> BoundReport:
    if not M.is_doubly_stochastic():
        raise ValueError("matrix is not doubly stochastic")
    n = M.shape[0]
    value = cpc(product_polynomial(M), [1] * n)
    return BoundReport.equality(value, 1.0, tol=tol, tag="doubly-stochastic-capacity",
                                context=f"cpc_1(p_M), n={n}")


def ab_stochastic_capacity_check(M: NonnegMatrix, a, b, tol: float = CAPACITY_EQ_TOL) -> BoundReport:
    if not M.is_ab_stochastic(a, b):
        raise ValueError(f"matrix is not ({a},{b})-stochastic")
    m, n = M.shape
    target = float(a) ** m
    value = cpc(product_polynomial(M), [Fraction(m, n)] * n)
    return BoundReport.equality(value, target, tol=tol, tag="ab-stochastic-capacity",
                                context=f"cpc_(m/n)(p_M) vs a^m, m={m} n={n} a={a} b={b}")


# -- counting ---------------------------------------------------------------

def matching_numbers(G: BipartiteGraph) -> List[int]:
    """``[mu_0, ..., mu_min(m,n)]`` by branching on the lowest unprocessed left vertex.

    Counts depend only on the next left vertex and the set of used right
    vertices, so those states are memoised.
    """
    adj = [G.neighbours(i) for i in range(G.left)]
    size = min(G.left, G.right)

    @functools.lru_cache(maxsize=None)
    def walk(i: int, used: int) -> Tuple[int, ...]:
        if i == G.left:
            return (1,) + (0,) * size
        out = list(walk(i + 1, used))
        for j in adj[i]:
            bit = 1 << j
            if not used & bit:
                for k, c in enumerate(walk(i + 1, used | bit)[:size]):
                    out[k + 1] += c
        return tuple(out)

    return list(walk(0, 0))


def count_matchings(G: BipartiteGraph, k: int) -> int:
    if not 0 <= k <= min(G.left, G.right):
        raise ValueError(f"k={k} out of range 0..{min(G.left, G.right)}")
    return matching_numbers(G)[k]


def permanent(M: NonnegMatrix):
    """Ryser's formula, subsets visited in Gray-code order; exact for rational entries."""
    m, n = M.shape
    if m != n:
        raise ValueError("permanent needs a square matrix")
    if n > 14:
        raise ValueError("permanent limited to n <= 14")
    A = M.entries
    zero = Fraction(0) if M.exact else 0.0
    sums = [zero] * n
    total = zero
    subset = 0
    for g in range(1, 1 << n):
        j = (g & -g).bit_length() - 1
        subset ^= 1 << j
        sign = 1 if subset >> j & 1 else -1
        for i in range(n):
            sums[i] += sign * A[i][j]
        term = math.prod(sums, start=Fraction(1) if M.exact else 1.0)
        total += -term if bin(subset).count("1") % 2 else term
    return total if n % 2 == 0 else -total


def vdw_product(n: int) -> Fraction:
    """``prod_{k=2}^n ((k-1)/k)^(k-1)``, exactly."""
    return math.prod((Fraction(k - 1, k) ** (k - 1) for k in range(2, n + 1)), start=Fraction(1))


def _derivative_factor(d: int) -> float:
    return 1.0 if d <= 1 else ((d - 1) / d) ** (d - 1)


@dataclass(frozen=True)
class VdwChain:
    permanent: object
    ryser: object
    bound: BoundReport
    product_identity: bool
    steps: Tuple[BoundReport, ...] = ()

    @property
    def holds(self) -> bool:
        agree = self.permanent == self.ryser if isinstance(self.ryser, Fraction) else \
            math.isclose(float(self.permanent), float(self.ryser), rel_tol=1e-9, abs_tol=1e-15)
        return agree and self.product_identity and self.bound.holds and all(s.holds for s in self.steps)


def vdw_chain(M: NonnegMatrix, with_steps: bool = False) -> VdwChain:
    """Differentiate ``p_M`` at 0 one variable at a time; the result is ``per(M)``.

    The headline report is ``per(M) >= n!/n^n * cpc_1(p_M)``.  With
    ``with_steps`` every single-variable step is checked against its own
    factor ``((d-1)/d)^(d-1)``, ``d`` the current degree in that variable.
    """
    if not M.is_doubly_stochastic():
        raise ValueError("matrix is not doubly stochastic")
    n = M.shape[0]
    if n > 10:
        raise ValueError("vdw_chain limited to n <= 10")
    p = product_polynomial(M)
    cap0 = cpc(p, [1] * n)
    steps = []
    cap = cap0
    for _ in range(n):
        lam = p.degrees()
        q = apply(derivative_at_zero(0, lam), p)
        if with_steps and q.arity:
            nxt = cpc(q, [1] * q.arity) if not q.is_zero() else 0.0
            steps.append(BoundReport.inequality(nxt / cap, _derivative_factor(lam[0]), tag="derivative-factor",
                                                context=f"step arity {p.arity}, degree {lam[0]}"))
            cap = nxt
        p = q
    per = p.coef(())
    ryser = permanent(M)
    prod = vdw_product(n)
    identity = prod == Fraction(math.factorial(n), n ** n)
    rep = BoundReport.inequality(float(per), float(prod) * cap0, tag="van-der-waerden",
                                 context=f"per(M) >= n!/n^n cpc(p_M), n={n}",
                                 exact_slack=(per - prod) if M.exact and cap0 == 1 else None)
    return VdwChain(per, ryser, rep, identity, tuple(steps))


# -- matching bounds ----------------------------------------------------------

def _lbinom(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _params(G_or_params) -> Tuple[int, int, int, int]:
    if isinstance(G_or_params, BipartiteGraph):
        a, b = G_or_params.degrees()
        return G_or_params.left, G_or_params.right, a, b
    m, n, a, b = G_or_params
    return int(m), int(n), int(a), int(b)


def _check_csikvari(m, n, a, b, k):
    if a * m != b * n:
        raise ValueError("need a*m == b*n")
    if not 0 <= k <= m:
        raise ValueError(f"k={k} out of range 0..{m}")


def csikvari_bound(G_or_params, k: int) -> float:
    """``binom(n,k) (ab)^k m^m (ma-k)^(ma-k) / ((ma)^(ma) (m-k)^(m-k))``, in log space."""
    m, n, a, b = _params(G_or_params)
    _check_csikvari(m, n, a, b, k)
    if k > n:
        return 0.0
    # regrouped as binom(n,k) b^k (1-k/(ma))^(ma-k) (1-k/m)^(k-m) so that log1p avoids cancellation
    log_v = _lbinom(n, k) + k * math.log(b)
    if m * a > k:
        log_v += (m * a - k) * math.log1p(-k / (m * a))
    if m > k:
        log_v -= (m - k) * math.log1p(-k / m)
    return math.exp(log_v)


def csikvari_bound_exact(G_or_params, k: int) -> Fraction:
    m, n, a, b = _params(G_or_params)
    _check_csikvari(m, n, a, b, k)
    num = math.comb(n, k) * (a * b) ** k * m ** m * (m * a - k) ** (m * a - k)
    den = (m * a) ** (m * a) * (m - k) ** (m - k)
    return Fraction(num, den)


def schrijver_bound(n: int, d: int, k: int) -> float:
    """``binom(n,k) d^k ((nd-k)/(nd))^(nd-k) (n/(n-k))^(n-k)`` for d-regular graphs on n+n vertices."""
    if not 0 <= k <= n:
        raise ValueError(f"k={k} out of range 0..{n}")
    log_v = _lbinom(n, k) + k * math.log(d)
    if n * d > k:
        log_v += (n * d - k) * (math.log(n * d - k) - math.log(n * d))
    if n > k:
        log_v += (n - k) * (math.log(n) - math.log(n - k))
    return math.exp(log_v)


@dataclass(frozen=True)
class MatchingSymbol:
    symbol: SparsePoly
    identity: BoundReport
    stability: StabilityVerdict


def matching_symbol_factored(n: int, k: int, b: int) -> SparsePoly:
    """``b^k prod_j (1+z_j)^(b-1) binom(n,k) Pol^n(z^k (1+z)^(n-k))``."""
    one_plus = [SparsePoly.linear_form([int(i == j) for i in range(n)], 1) for j in range(n)]
    base = P.product(f ** (b - 1) for f in one_plus) if b > 1 else SparsePoly.constant(n, 1)
    u = SparsePoly.monomial((k,)) * SparsePoly.univariate([1, 1]) ** (n - k)
    pol = P.polarize(u, (n,))
    return base * pol * (b ** k * math.comb(n, k))


def matching_operator_symbol(n: int, k: int, b: int, trials: int = 200, seed: int = 0) -> MatchingSymbol:
    """Symbol of ``sum_{|S|=k} d^S |_{x=1}`` on degree box ``(b,...,b)``, checked two ways."""
    if not (0 <= k <= n and b >= 1):
        raise ValueError("need 0 <= k <= n and b >= 1")
    S = symbol_bounded(matching_operator(n, k, (b,) * n))
    F = matching_symbol_factored(n, k, b)
    mismatch = len(set(S.terms.items()) ^ set(F.terms.items()))
    rep = BoundReport(float(len(S)), float(len(F)), float(mismatch), mismatch == 0,
                      f"n={n} k={k} b={b}, termwise", "matching-symbol", "exact", 0.0, False,
                      mismatch)
    return MatchingSymbol(S, rep, probabilistic_stability_test(S, trials, seed))


def matching_capacity_closed_form(m: int, n: int, b: int, k: int) -> float:
    """``cpc_m(z^k (1+z)^(nb-k)) = ((nb-k)/(m-k))^(m-k) ((nb-k)/(nb-m))^(nb-m)``."""
    N = n * b
    log_v = 0.0
    if m > k:
        log_v += (m - k) * (math.log(N - k) - math.log(m - k))
    if N > m:
        log_v += (N - m) * (math.log(N - k) - math.log(N - m))
    return math.exp(log_v)


SYMBOL_BOX_LIMIT = 1024


def symmetric_symbol_diagonal(T, b: int) -> SparsePoly:
    """``Symb(T)(z, ..., z)`` for a permutation-invariant ``T`` on degree box ``(b,...,b)``.

    Sums one representative per orbit of exponents, weighted by orbit size.  For
    a symmetric symbol with nonnegative coefficients, capacity at a constant
    ``alpha`` equals the capacity of this diagonal at ``sum(alpha)``, since the
    log objective is convex and permutation invariant.
    """
    n = T.in_arity
    out = {}
    for counts in _compositions(n, b + 1):
        mu = tuple(v for v, c in enumerate(counts) for _ in range(c))
        img = apply(T, SparsePoly.monomial(mu))
        if img.is_zero():
            continue
        orbit = math.factorial(n)
        for c in counts:
            orbit //= math.factorial(c)
        w = orbit * math.prod(math.comb(b, v) for v in mu) * img.coef(())
        d = (sum(mu),)
        out[d] = out.get(d, 0) + w
    return SparsePoly(1, out)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for c in range(total + 1):
        for rest in _compositions(total - c, parts - 1):
            yield (c,) + rest


def csikvari_derivation_check(G: BipartiteGraph, k: int, tol: float = 1e-10) -> List[BoundReport]:
    """Every link of the capacity proof of the matching bound on one graph.

    (i) ``a^(m-k) mu_k == sum_{|S|=k} d^S p_M(1)`` exactly;
    (ii) ``cpc_(m/n)(Symb) == b^k binom(n,k) cpc_m(z^k (1+z)^(nb-k))`` numerically;
    (iii) the bound assembled from the pieces matches :func:`csikvari_bound`;
    then ``mu_k >= bound``.
    """
    a, b = G.degrees()
    m, n = G.left, G.right
    _check_csikvari(m, n, a, b, k)
    ctx = f"m={m} n={n} a={a} b={b} k={k}"
    reports = []

    pM = product_polynomial(G.matrix())
    lam = (b,) * n
    T = matching_operator(n, k, lam)
    derivative_sum = apply(T, pM).coef(())
    mu_k = count_matchings(G, k) if k <= min(m, n) else 0
    reports.append(BoundReport.equality(a ** (m - k) * mu_k, derivative_sum, exact=True,
                                        tag="matching-derivative-identity", context=ctx))

    alpha = [Fraction(m, n)] * n
    closed = b ** k * math.comb(n, k) * matching_capacity_closed_form(m, n, b, k) if k <= n else 0.0
    if (b + 1) ** n <= SYMBOL_BOX_LIMIT:
        S = symbol_bounded(T)
        numeric = cpc(S, alpha) if not S.is_zero() else 0.0
        how = " full symbol"
    else:
        D = symmetric_symbol_diagonal(T, b)
        numeric = cpc(D, [m]) if not D.is_zero() else 0.0
        how = " symbol diagonal"
    reports.append(BoundReport.equality(numeric, closed, tol=1e-8, tag="symbol-capacity",
                                        context=ctx + how))

    factor = bounded_factor(alpha, lam)
    assembled = float(a) ** (k - m) * factor * float(a) ** m * closed
    target = csikvari_bound((m, n, a, b), k)
    reports.append(BoundReport.equality(assembled, target, tol=tol, tag="assembled-bound",
                                        context=ctx))

    reports.append(BoundReport.inequality(mu_k, target, tag="csikvari", context=ctx,
                                          exact_slack=mu_k - csikvari_bound_exact((m, n, a, b), k)))
    return reports


# -- random graphs ------------------------------------------------------------

def _complement(G: BipartiteGraph, biregular) -> BipartiteGraph:
    edges = frozenset((i, j) for i in range(G.left) for j in range(G.right)) - G.edges
    return BipartiteGraph(G.left, G.right, edges, biregular)


def random_regular_bipartite(n: int, d: int, rng: np.random.Generator,
                             max_tries: int = 100_000) -> BipartiteGraph:
    """Union of ``d`` random perfect matchings, redrawn until no edge repeats.

    For ``d > n/2`` the complement of an ``(n-d)``-regular draw is returned,
    which keeps the rejection rate low.
    """
    if not 0 <= d <= n:
        raise ValueError("need 0 <= d <= n")
    if 2 * d > n:
        return _complement(random_regular_bipartite(n, n - d, rng, max_tries), (d, d))
    for _ in range(max_tries):
        edges = set()
        for _ in range(d):
            perm = rng.permutation(n)
            new = {(i, int(perm[i])) for i in range(n)}
            if new & edges:
                break
            edges |= new
        else:
            return BipartiteGraph(n, n, frozenset(edges), (d, d))
    raise RuntimeError("could not draw a simple regular bipartite graph")


def random_biregular(m: int, n: int, a: int, b: int, rng: np.random.Generator,
                     max_tries: int = 100_000) -> BipartiteGraph:
    """Configuration model: pair left and right stubs at random, reject multi-edges.

    Dense parameters (``2a > n``) are drawn as complements of sparse ones.
    """
    if a * m != b * n or not (0 <= a <= n and 0 <= b <= m):
        raise ValueError("infeasible biregular parameters")
    if 2 * a > n:
        return _complement(random_biregular(m, n, n - a, m - b, rng, max_tries), (a, b))
    left_stubs = np.repeat(np.arange(m), a)
    right_stubs = np.repeat(np.arange(n), b)
    for _ in range(max_tries):
        pairs = set(zip(left_stubs.tolist(), rng.permutation(right_stubs).tolist()))
        if len(pairs) == a * m:
            return BipartiteGraph(m, n, frozenset(pairs), (a, b))
    raise RuntimeError("could not draw a simple biregular graph")
