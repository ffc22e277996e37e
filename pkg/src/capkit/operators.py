"""Linear operators on polynomial spaces, their symbols, and capacity bounds.

Operators are stored extensionally: a table sending each monomial ``x^mu`` of
the domain to its image polynomial.  The domain is either a degree box
``0 <= mu <= lam`` (bounded operators) or a total-degree ball ``|mu| <= N``
(a finite window onto an operator defined on all polynomials).

Symbol conventions, with ``z`` the input-side variables placed first::

    Symb^lam(T) = T[(1 + x z)^lam] = sum_{mu <= lam} binom(lam, mu) z^mu T(x^mu)
    Symb^inf(T) = T[exp(x . z)]     = sum_mu z^mu T(x^mu) / mu!
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterator, Optional, Sequence, Tuple

from . import poly as P
from .capacity import capacity, cpc, power_self, xlogx
from .poly import FLOAT, RATIONAL, Exponent, SparsePoly, to_fraction
from .report import EQ_TOL, INEQ_TOL, BoundReport, trivial_report
from .stability import probabilistic_stability_test

log = logging.getLogger(__name__)

DEFAULT_ORDER = 24


class StabilityRejected(ValueError):
    """Raised when an input fails the sampled stability test and no override is set."""


def box(lam: Sequence[int]) -> Iterator[Exponent]:
    return itertools.product(*(range(l + 1) for l in lam))


def ball(n: int, N: int) -> Iterator[Exponent]:
    """Exponents with ``|mu| <= N``, lexicographic."""
    if n == 0:
        yield ()
        return
    for first in range(N + 1):
        for rest in ball(n - 1, N - first):
            yield (first,) + rest


class LazyAction(Mapping):
    """Action table filled on first access to each monomial.

    Built-in operators use this so that applying them to a polynomial only
    touches the monomials actually present, not the whole degree box.
    """

    def __init__(self, fn: Callable[[Exponent], SparsePoly], domain: Callable[[], Iterator],
                 contains: Callable[[Exponent], bool], out_arity: int):
        self._fn = fn
        self._domain = domain
        self._contains = contains
        self._out_arity = out_arity
        self._cache: Dict[Exponent, SparsePoly] = {}

    def __getitem__(self, mu: Exponent) -> SparsePoly:
        img = self._cache.get(mu)
        if img is None:
            if not self._contains(mu):
                raise KeyError(mu)
            img = self._fn(mu)
            if img.arity != self._out_arity:
                raise ValueError(f"image of {mu} has arity {img.arity}, expected {self._out_arity}")
            self._cache[mu] = img
        return img

    def __iter__(self):
        return self._domain()

    def __len__(self) -> int:
        return sum(1 for _ in self._domain())

    def __eq__(self, other):
        return Mapping.__eq__(self, other)


@dataclass(frozen=True)
class LinearOperator:
    in_arity: int
    out_arity: int
    action: Mapping[Exponent, SparsePoly] = field(repr=False)
    profile: Optional[Tuple[int, ...]] = None
    order: Optional[int] = None
    name: str = ""

    def __post_init__(self):
        if (self.profile is None) == (self.order is None):
            raise ValueError("give exactly one of profile (bounded) or order (unbounded)")
        if self.profile is not None and len(self.profile) != self.in_arity:
            raise ValueError("profile length must equal in_arity")
        if isinstance(self.action, LazyAction):
            return
        for mu in self.domain():
            img = self.action.get(mu)
            if img is None:
                raise ValueError(f"action undefined at {mu}")
            if img.arity != self.out_arity:
                raise ValueError(f"image of {mu} has arity {img.arity}, expected {self.out_arity}")

    @property
    def bounded(self) -> bool:
        return self.profile is not None

    def domain(self) -> Iterator[Exponent]:
        if self.bounded:
            return box(self.profile)
        return ball(self.in_arity, self.order)

    def in_domain(self, mu: Sequence[int]) -> bool:
        if self.bounded:
            return all(0 <= m <= l for m, l in zip(mu, self.profile))
        return sum(mu) <= self.order

    def image(self, mu: Sequence[int]) -> SparsePoly:
        mu = tuple(mu)
        if not self.in_domain(mu):
            raise ValueError(f"monomial {mu} outside the operator's domain")
        return self.action[mu]

    def __call__(self, p: SparsePoly) -> SparsePoly:
        return apply(self, p)

    @classmethod
    def from_function(cls, in_arity: int, out_arity: int,
                      fn: Callable[[Exponent], SparsePoly], profile=None, order=None,
                      name: str = "") -> "LinearOperator":
        prof = tuple(profile) if profile is not None else None
        if prof is not None:
            domain = lambda: box(prof)
            contains = lambda mu: len(mu) == in_arity and all(0 <= m <= l for m, l in zip(mu, prof))
        else:
            domain = lambda: ball(in_arity, order)
            contains = lambda mu: len(mu) == in_arity and min(mu, default=0) >= 0 and sum(mu) <= order
        return cls(in_arity, out_arity, LazyAction(fn, domain, contains, out_arity), prof, order,
                   name)

    # JSON shape: {"in_arity", "out_arity", "profile": [...] | {"unbounded": N}, "action": [...]}
    def to_json(self) -> dict:
        from .io import poly_to_json

        return {
            "in_arity": self.in_arity,
            "out_arity": self.out_arity,
            "profile": list(self.profile) if self.bounded else {"unbounded": self.order},
            "action": [{"mu": list(mu), "image": poly_to_json(self.action[mu])}
                       for mu in sorted(self.domain())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LinearOperator":
        from .io import poly_from_json

        prof = data["profile"]
        action = {}
        for entry in data["action"]:
            mu = tuple(int(v) for v in entry["mu"])
            if mu in action:
                raise ValueError(f"duplicate action entry for {mu}")
            action[mu] = poly_from_json(entry["image"])
        if isinstance(prof, dict):
            return cls(int(data["in_arity"]), int(data["out_arity"]), action, None,
                       int(prof["unbounded"]))
        return cls(int(data["in_arity"]), int(data["out_arity"]), action,
                   tuple(int(v) for v in prof), None)


def apply(T: LinearOperator, p: SparsePoly) -> SparsePoly:
    """``sum_mu p_mu T(x^mu)``."""
    if p.arity != T.in_arity:
        raise ValueError(f"operator expects arity {T.in_arity}, got {p.arity}")
    out: Dict[Exponent, object] = {}
    for mu, c in p.terms.items():
        img = T.image(mu)
        for nu, d in img.terms.items():
            out[nu] = out.get(nu, 0) + c * d
    mode = FLOAT if p.mode == FLOAT else None
    return SparsePoly(T.out_arity, out, mode)


# -- built-in operators ------------------------------------------------------

def _const(c, arity: int = 0) -> SparsePoly:
    return SparsePoly(arity, {(0,) * arity: c})


def identity(lam: Sequence[int] | None = None, n: int | None = None,
             order: int | None = None) -> LinearOperator:
    if lam is not None:
        n = len(lam)
    return LinearOperator.from_function(n, n, lambda mu: SparsePoly.monomial(mu), lam, order,
                                        "identity")


def derivative_at(k: int, value=0, lam: Sequence[int] | None = None, n: int | None = None,
                  order: int | None = None) -> LinearOperator:
    """``d/dx_k`` followed by ``x_k := value``; output drops ``x_k``."""
    if lam is not None:
        n = len(lam)
    if not 0 <= k < n:
        raise IndexError("variable index out of range")
    if value < 0:
        raise ValueError("evaluation point must be nonnegative")
    value = to_fraction(value)

    def fn(mu):
        rest = mu[:k] + mu[k + 1:]
        if mu[k] == 0:
            return SparsePoly.zero(n - 1)
        coef = mu[k] * (value ** (mu[k] - 1) if mu[k] > 1 else 1)
        return SparsePoly(n - 1, {rest: coef})

    return LinearOperator.from_function(n, n - 1, fn, lam, order, f"d/dx{k}|x{k}={value}")


def derivative_at_zero(k: int, lam: Sequence[int] | None = None, n: int | None = None,
                       order: int | None = None) -> LinearOperator:
    return derivative_at(k, 0, lam, n, order)


def evaluation(point: Sequence, lam: Sequence[int] | None = None,
               order: int | None = None) -> LinearOperator:
    """``p -> p(point)``, a constant (arity-0) output."""
    point = [to_fraction(v) for v in point]
    if any(v < 0 for v in point):
        raise ValueError("evaluation point must be nonnegative")
    fn = lambda mu: _const(math.prod((v ** m for v, m in zip(point, mu)), start=Fraction(1)))
    return LinearOperator.from_function(len(point), 0, fn, lam, order, "evaluation")


def constant_term(lam: Sequence[int]) -> LinearOperator:
    n = len(lam)
    fn = lambda mu: _const(1 if not any(mu) else 0)
    return LinearOperator.from_function(n, 0, fn, lam, None, "constant-term")


def matching_operator(n: int, k: int, lam: Sequence[int] | None = None,
                      order: int | None = None) -> LinearOperator:
    """``sum_{|S| = k} d^S |_{x = 1}``: sends ``x^mu`` to ``e_k(mu)``."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if lam is None and order is None:
        lam = (1,) * n
    fn = lambda mu: _const(P.elementary_symmetric(mu, k))
    return LinearOperator.from_function(n, 0, fn, lam, order, f"matching(n={n},k={k})")


def boxplus(q: SparsePoly, lam: Sequence[int], normalized: bool = False) -> LinearOperator:
    """``p -> sum_{mu <= lam} (d^mu p)(x) (d^(lam - mu) q)(0)``.

    With ``normalized`` the sum is divided by ``lam!``; only then is the symbol
    of the bilinear lift exactly ``(z + w + z w x)^lam`` (the plain sum gives
    ``lam!`` times that).
    """
    lam = P._check_profile(q, lam)
    n = len(lam)
    scale = Fraction(1, P.multi_factorial(lam)) if normalized else 1

    def fn(nu):
        out = {}
        for mu in box(lam):
            if any(m > v for m, v in zip(mu, nu)):
                continue
            rest = tuple(l - m for l, m in zip(lam, mu))
            qc = q.terms.get(rest)
            if not qc:
                continue
            falling = math.prod(math.factorial(v) // math.factorial(v - m) for v, m in zip(nu, mu))
            e = tuple(v - m for v, m in zip(nu, mu))
            out[e] = out.get(e, 0) + falling * P.multi_factorial(rest) * scale * qc
        return SparsePoly(n, out, q.mode)

    return LinearOperator.from_function(n, n, fn, lam, None, "boxplus")


def boxplus_apply(p: SparsePoly, q: SparsePoly, lam: Sequence[int],
                  normalized: bool = False) -> SparsePoly:
    P._check_profile(p, lam)
    return apply(boxplus(q, lam, normalized), p)


def boxplus_bilinear(lam: Sequence[int], normalized: bool = False) -> LinearOperator:
    """The bilinear lift ``x^mu y^nu -> x^mu boxplus x^nu`` on ``2n`` variables."""
    lam = tuple(lam)
    n = len(lam)
    scale = Fraction(1, P.multi_factorial(lam)) if normalized else 1

    def fn(munu):
        mu, nu = munu[:n], munu[n:]
        e = tuple(m + v - l for m, v, l in zip(mu, nu, lam))
        if any(v < 0 for v in e):
            return SparsePoly.zero(n)
        c = math.prod(math.factorial(m) // math.factorial(x) for m, x in zip(mu, e))
        return SparsePoly(n, {e: c * P.multi_factorial(nu) * scale})

    return LinearOperator.from_function(2 * n, n, fn, lam + lam, None, "boxplus-bilinear")


def boxplus_symbol_closed_form(lam: Sequence[int]) -> SparsePoly:
    """``prod_k (z_k + w_k + z_k w_k x_k)^lam_k`` in variables ``(z, w, x)``."""
    n = len(lam)
    factors = []
    for k, l in enumerate(lam):
        z = SparsePoly.variable(3 * n, k)
        w = SparsePoly.variable(3 * n, n + k)
        x = SparsePoly.variable(3 * n, 2 * n + k)
        factors.append((z + w + z * w * x) ** l)
    return P.product(factors) if factors else SparsePoly.constant(0, 1)


BUILTINS = {
    "identity": identity,
    "derivative_at": derivative_at,
    "derivative_at_zero": derivative_at_zero,
    "evaluation": evaluation,
    "constant_term": constant_term,
    "matching": matching_operator,
    "boxplus_bilinear": boxplus_bilinear,
}


# -- symbols and inner products ---------------------------------------------

def symbol_bounded(T: LinearOperator, lam: Sequence[int] | None = None) -> SparsePoly:
    """Exact ``Symb^lam(T)`` in ``(z_1..z_n, x_1..x_m)``."""
    if not T.bounded:
        raise ValueError("bounded symbol needs an operator with a degree profile")
    lam = T.profile if lam is None else tuple(lam)
    if len(lam) != T.in_arity or any(l > t for l, t in zip(lam, T.profile)):
        raise ValueError(f"profile {lam} not within operator profile {T.profile}")
    out: Dict[Exponent, object] = {}
    for mu in box(lam):
        w = P.multi_binom(lam, mu)
        for nu, c in T.action[mu].terms.items():
            out[mu + nu] = out.get(mu + nu, 0) + w * c
    return SparsePoly(T.in_arity + T.out_arity, out)


def symbol_trans_truncated(T: LinearOperator, N: int = DEFAULT_ORDER) -> SparsePoly:
    """Degree-``N`` truncation (in ``z``) of ``Symb^inf(T)``."""
    out: Dict[Exponent, object] = {}
    for mu in ball(T.in_arity, N):
        if not T.in_domain(mu):
            raise ValueError(f"action undefined at {mu}; operator cannot supply order {N}")
        w = Fraction(1, P.multi_factorial(mu))
        for nu, c in T.action[mu].terms.items():
            out[mu + nu] = out.get(mu + nu, 0) + w * c
    return SparsePoly(T.in_arity + T.out_arity, out)


def _zero_like(p: SparsePoly, q: SparsePoly):
    return Fraction(0) if p.mode == RATIONAL and q.mode == RATIONAL else 0.0


def inner_product_bounded(p: SparsePoly, q: SparsePoly, lam: Sequence[int]):
    """``sum_mu p_mu q_mu / binom(lam, mu)``."""
    lam = P._check_profile(p, lam)
    P._check_profile(q, lam)
    total = _zero_like(p, q)
    for mu, c in p.terms.items():
        d = q.terms.get(mu)
        if d:
            total += Fraction(c * d, P.multi_binom(lam, mu)) if total.__class__ is Fraction \
                else c * d / P.multi_binom(lam, mu)
    return total


def inner_product_trans(p: SparsePoly, q: SparsePoly):
    """``sum_mu mu! p_mu q_mu``."""
    if p.arity != q.arity:
        raise ValueError("arity mismatch")
    total = _zero_like(p, q)
    for mu, c in p.terms.items():
        d = q.terms.get(mu)
        if d:
            total += P.multi_factorial(mu) * c * d
    return total


def _specialize_tail(S: SparsePoly, head: int, x0: Sequence) -> Dict[Exponent, object]:
    """Coefficients in the leading variables after fixing the rest of ``S`` to ``x0``.

    Returned as a plain mapping: with negative entries in ``x0`` the
    coefficients can be negative, which a SparsePoly does not allow.
    """
    if len(x0) != S.arity - head:
        raise ValueError("point length does not match the operator's output arity")
    x0 = list(x0)
    out: Dict[Exponent, object] = {}
    for e, c in S.terms.items():
        for v, d in zip(x0, e[head:]):
            if d:
                c = c * v ** d
        out[e[:head]] = out.get(e[:head], 0) + c
    return out


def symbol_identity_check(T: LinearOperator, p: SparsePoly, x0: Sequence) -> BoundReport:
    """``T[p](x0) == <Symb(T)(z, x0), p(z)>`` with the inner product matching ``T``'s symbol."""
    x0 = [to_fraction(v) for v in x0]
    lhs = P.evaluate(apply(T, p), x0)
    if T.bounded:
        P._check_profile(p, T.profile)
        S = _specialize_tail(symbol_bounded(T), T.in_arity, x0)
        rhs = sum((c * S[mu] / P.multi_binom(T.profile, mu) for mu, c in p.terms.items()
                   if mu in S), Fraction(0))
        kind = "bounded"
    else:
        if p.total_degree() > T.order:
            raise ValueError("polynomial degree exceeds the operator's truncation order")
        S = _specialize_tail(symbol_trans_truncated(T, T.order), T.in_arity, x0)
        rhs = sum((c * S[mu] * P.multi_factorial(mu) for mu, c in p.terms.items() if mu in S),
                  Fraction(0))
        kind = "transcendental"
    exact = p.mode == RATIONAL
    return BoundReport.equality(lhs, rhs, exact=exact, tag="symbol-identity",
                                context=f"{T.name or 'T'} ({kind}) at x0={[str(v) for v in x0]}")


# -- capacity bounds ---------------------------------------------------------

def bounded_factor(alpha: Sequence, lam: Sequence[int]) -> float:
    """``alpha^alpha (lam - alpha)^(lam - alpha) / lam^lam`` with ``0^0 = 1``."""
    s = 0.0
    for a, l in zip(alpha, lam):
        a = float(a)
        if a > l:
            return 0.0
        s += xlogx(a) + xlogx(l - a) - xlogx(l)
    return math.exp(s)


def trans_factor(alpha: Sequence) -> float:
    """``exp(-sum alpha) alpha^alpha``."""
    return math.exp(-sum(float(a) for a in alpha)) * power_self(alpha)


def _fvec(v) -> list:
    return [to_fraction(a) for a in v]


def preservation_bound_bounded(T: LinearOperator, lam: Sequence[int] | None, alpha, beta) -> float:
    lam = T.profile if lam is None else tuple(lam)
    S = symbol_bounded(T, lam)
    if S.is_zero():
        return 0.0
    return bounded_factor(alpha, lam) * cpc(S, _fvec(alpha) + _fvec(beta))


def preservation_bound_trans(T: LinearOperator, N: int | None, alpha, beta) -> float:
    S = symbol_trans_truncated(T, T.order if N is None else N)
    if S.is_zero():
        return 0.0
    return trans_factor(alpha) * cpc(S, _fvec(alpha) + _fvec(beta))


def admit(p: SparsePoly, override: bool = False, trials: int = 200, seed: int = 0) -> None:
    if override:
        return
    verdict = probabilistic_stability_test(p, trials, seed)
    if not verdict.passed:
        raise StabilityRejected(f"input failed the stability test on line {verdict.line}")


def verify_preservation(T: LinearOperator, p: SparsePoly, alpha, beta, mode: str = "bounded",
                        N: int | None = None, override_stability: bool = False,
                        seed: int = 0, tol: float = INEQ_TOL) -> BoundReport:
    """``cpc_beta(T p) / cpc_alpha(p)`` against the symbol bound."""
    admit(p, override_stability, seed=seed)
    alpha, beta = _fvec(alpha), _fvec(beta)
    ctx = f"{T.name or 'T'} {mode}: alpha={[str(a) for a in alpha]} beta={[str(b) for b in beta]}"
    base = cpc(p, alpha)
    if base == 0:
        return trivial_report(ctx + " (alpha outside Newt(p))", "preservation")
    if mode == "bounded":
        rhs = preservation_bound_bounded(T, None, alpha, beta)
        tag = "bounded-degree"
    elif mode == "trans":
        rhs = preservation_bound_trans(T, N, alpha, beta)
        tag = "unbounded-degree"
    else:
        raise ValueError(f"unknown mode {mode!r}")
    Tp = apply(T, p)
    lhs = cpc(Tp, beta) / base if not Tp.is_zero() else 0.0
    return BoundReport.inequality(lhs, rhs, tol=tol, context=ctx, tag=tag, trivial=rhs == 0)


def verify_inner_product_bound(p: SparsePoly, q: SparsePoly, lam: Sequence[int] | None, alpha,
                               override_stability: bool = False, seed: int = 0,
                               tol: float = INEQ_TOL) -> BoundReport:
    """``<p, q>^lam >= factor * cpc(p) cpc(q)``; ``lam=None`` selects ``<., .>^inf``."""
    admit(p, override_stability, seed=seed)
    admit(q, override_stability, seed=seed + 1)
    alpha = _fvec(alpha)
    if lam is None:
        lhs = inner_product_trans(p, q)
        factor = trans_factor(alpha)
        tag, label = "anari-gharan-inf", "inf"
    else:
        lhs = inner_product_bounded(p, q, lam)
        factor = bounded_factor(alpha, lam)
        tag, label = "inner-product-bounded", str(tuple(lam))
    cp, cq = cpc(p, alpha), cpc(q, alpha)
    rhs = factor * cp * cq
    return BoundReport.inequality(lhs, rhs, tol=tol, tag=tag, trivial=rhs == 0,
                                  context=f"<p,q>^{label} alpha={[str(a) for a in alpha]}")


def polarization_inner_product_check(p: SparsePoly, q: SparsePoly, lam: Sequence[int]) -> BoundReport:
    lhs = inner_product_bounded(p, q, lam)
    ones = (1,) * sum(lam)
    rhs = inner_product_bounded(P.polarize(p, lam), P.polarize(q, lam), ones)
    exact = p.mode == RATIONAL and q.mode == RATIONAL
    return BoundReport.equality(lhs, rhs, exact=exact, tag="polarization-inner-product",
                                context=f"lam={tuple(lam)}")


def multinomial_inner_product(p: SparsePoly, q: SparsePoly, d: int):
    total = _zero_like(p, q)
    for mu, c in p.terms.items():
        e = q.terms.get(mu)
        if e:
            mult = math.factorial(d) // P.multi_factorial(mu)
            total += Fraction(c * e, mult) if total.__class__ is Fraction else c * e / mult
    return total


def homogeneous_conjecture_probe(p: SparsePoly, q: SparsePoly, alpha) -> BoundReport:
    """Open conjecture for homogeneous stable pairs; failures are logged, never raised."""
    if p.arity != q.arity:
        raise ValueError("arity mismatch")
    if not (p.is_homogeneous() and q.is_homogeneous()):
        raise ValueError("conjecture probe needs homogeneous polynomials")
    d = p.total_degree()
    if q.total_degree() != d:
        raise ValueError("p and q must share the total degree")
    alpha = _fvec(alpha)
    lhs = multinomial_inner_product(p, q, d)
    rhs = power_self(alpha) / float(d) ** d * cpc(p, alpha) * cpc(q, alpha) if d else \
        cpc(p, alpha) * cpc(q, alpha)
    rep = BoundReport.inequality(lhs, rhs, tag="homogeneous-conjecture", trivial=rhs == 0,
                                 context=f"homogeneous d={d} alpha={[str(a) for a in alpha]}")
    if not rep.holds:
        log.warning("possible counterexample to the multinomial conjecture: p=%r q=%r alpha=%s "
                    "lhs=%.12g rhs=%.12g", p, q, alpha, rep.lhs, rep.rhs)
    return rep


gurvits_conjecture_probe = homogeneous_conjecture_probe  # public alias


def verify_boxplus_corollary(p: SparsePoly, q: SparsePoly, lam: Sequence[int], beta, gamma,
                             normalized: bool = False, tol: float = INEQ_TOL) -> BoundReport:
    """``alpha^alpha cpc_alpha(p [+] q) >= lam^-lam beta^beta cpc_beta(p) gamma^gamma cpc_gamma(q)``
    with ``alpha = beta + gamma - lam``."""
    lam = tuple(lam)
    beta, gamma = _fvec(beta), _fvec(gamma)
    alpha = [b + g - l for b, g, l in zip(beta, gamma, lam)]
    ctx = f"boxplus lam={lam} beta={[str(b) for b in beta]} gamma={[str(g) for g in gamma]}"
    if any(a < 0 for a in alpha):
        return trivial_report(ctx + " (alpha = beta + gamma - lam not nonnegative)", "boxplus")
    r = boxplus_apply(p, q, lam, normalized)
    lhs = power_self(alpha) * cpc(r, alpha) if not r.is_zero() else 0.0
    rhs = math.exp(-sum(xlogx(l) for l in lam)) * power_self(beta) * cpc(p, beta) \
        * power_self(gamma) * cpc(q, gamma)
    return BoundReport.inequality(lhs, rhs, tol=tol, context=ctx, tag="boxplus-corollary",
                                  trivial=rhs == 0, alpha=[str(a) for a in alpha])


def tightness_probe(T: LinearOperator, alpha, beta) -> BoundReport:
    """Evaluate the ratio on ``p_y = prod_k (1 + x_k y_k)^lam_k`` at the symbol's optimiser.

    Along this family ``T(p_y)(x) = Symb(T)(y, x)``, so at ``y = exp(z*)`` the
    ratio meets the bound; only this family is searched.
    """
    import numpy as np

    lam = T.profile
    alpha, beta = _fvec(alpha), _fvec(beta)
    S = symbol_bounded(T)
    res = capacity(S, alpha + beta)
    rhs = bounded_factor(alpha, lam) * res.value
    if res.minimizer_log is None:
        return trivial_report("symbol capacity not attained; family cannot reach the bound",
                              "tightness", rhs=rhs, lhs=rhs)
    y = [float(v) for v in np.exp(res.minimizer_log[:T.in_arity])]
    n = T.in_arity
    factors = [SparsePoly.linear_form([y[k] if j == k else 0.0 for j in range(n)], 1.0) ** lam[k]
               for k in range(n)]
    p_y = P.product(factors) if factors else _const(1.0)
    Tp = apply(T, p_y)
    lhs = cpc(Tp, beta) / cpc(p_y, alpha)
    return BoundReport.equality(lhs, rhs, tol=1e-6, tag="tightness",
                                context=f"{T.name or 'T'} family prod(1+x_k y_k)^lam_k")
