"""Randomised verification suites behind ``capkit verify``.

Every suite draws all of its random instances up front from one seeded
generator, then returns a list of zero-argument jobs.  Jobs are pure, so they
can run in any order or in parallel; results are reassembled by index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import combinatorics as C
from . import operators as O
from . import poly as P
from .poly import SparsePoly
from .polytope import convex_weights
from .report import INEQ_TOL, BoundReport

Job = Callable[[], List[BoundReport]]


@dataclass
class SuiteConfig:
    seed: int = 0
    trials: int = 20
    lam: Optional[List[int]] = None
    n: Optional[List[int]] = None
    alpha: Optional[List[Fraction]] = None
    beta: Optional[List[Fraction]] = None
    tol: float = INEQ_TOL
    max_vertices: int = 16
    matrix: str = "uniform"
    override_stability: bool = False
    extra: Dict[str, object] = field(default_factory=dict)


# -- random building blocks --------------------------------------------------

def rand_q(rng: np.random.Generator, lo: float, hi: float, den: int = 16) -> Fraction:
    """Random rational on the grid ``Z / den`` inside ``[lo, hi]``."""
    return Fraction(int(rng.integers(math.ceil(lo * den), math.floor(hi * den) + 1)), den)


def random_affine_product(rng: np.random.Generator, n: int, factors: int,
                          homogeneous: bool = False, density: float = 0.7) -> SparsePoly:
    """Product of random affine forms with nonnegative rational coefficients."""
    p = SparsePoly.constant(n, 1)
    for _ in range(factors):
        coeffs = [rand_q(rng, 0.25, 2) if rng.random() < density else Fraction(0) for _ in range(n)]
        if not any(coeffs):
            coeffs[int(rng.integers(n))] = rand_q(rng, 0.25, 2)
        const = 0 if homogeneous else rand_q(rng, 0.25, 2)
        p = p * SparsePoly.linear_form(coeffs, const)
    return p


def random_profile_product(rng: np.random.Generator, lam: Sequence[int]) -> SparsePoly:
    """Random stable product whose degree in ``x_k`` is at most ``lam_k``."""
    n = len(lam)
    r = int(rng.integers(1, min(lam) + 1))
    p = random_affine_product(rng, n, r)
    for k in range(n):
        for _ in range(int(rng.integers(0, lam[k] - r + 1))):
            coeffs = [Fraction(0)] * n
            coeffs[k] = rand_q(rng, 0.25, 2)
            p = p * SparsePoly.linear_form(coeffs, rand_q(rng, 0.25, 2))
    return p


def random_hull_point(rng: np.random.Generator, p: SparsePoly, den: int = 8) -> List[Fraction]:
    """Random rational convex combination of (at most 4) support points of ``p``."""
    pts = p.support()
    picks = rng.choice(len(pts), size=min(4, len(pts)), replace=False)
    w = [Fraction(int(rng.integers(1, den + 1))) for _ in picks]
    total = sum(w)
    return [sum(wi * pts[i][k] for wi, i in zip(w, picks)) / total for k in range(p.arity)]


def _stable_univariate_product(rng, n: int, lam: Sequence[int]) -> SparsePoly:
    q = SparsePoly.constant(n, 1)
    for k in range(n):
        for _ in range(int(rng.integers(0, lam[k] + 1))):
            coeffs = [Fraction(0)] * n
            coeffs[k] = rand_q(rng, 0.25, 2)
            q = q * SparsePoly.linear_form(coeffs, rand_q(rng, 0.25, 2))
    return q


# -- suites -------------------------------------------------------------------

def derivative(cfg: SuiteConfig) -> List[Job]:
    rng = np.random.default_rng(cfg.seed)
    jobs: List[Job] = []
    for lam in cfg.lam or [2, 3, 4, 5, 6]:
        if lam < 1:
            raise ValueError("lambda must be >= 1")
        factor = 1.0 if lam == 1 else ((lam - 1) / lam) ** (lam - 1)

        def tight(lam=lam, factor=factor):
            p = SparsePoly.univariate([1, 1]) ** lam
            T = O.derivative_at_zero(0, (lam,))
            rep = O.verify_preservation(T, p, [1], [], override_stability=cfg.override_stability,
                                        tol=cfg.tol)
            closed = BoundReport.equality(rep.lhs, factor, tol=1e-9, tag="derivative-factor",
                                          context=f"(1+x)^{lam}: ratio equals ((l-1)/l)^(l-1)")
            return [rep, closed]

        jobs.append(tight)
        for t in range(cfg.trials):
            p = random_affine_product(rng, 2, lam, density=1.0)
            seed = int(rng.integers(2**31))

            def trial(p=p, lam=lam, factor=factor, seed=seed):
                T = O.derivative_at_zero(0, p.degrees())
                rep = O.verify_preservation(T, p, [1, 1], [1], seed=seed, tol=cfg.tol,
                                            override_stability=cfg.override_stability)
                same = BoundReport.equality(rep.rhs, factor, tol=1e-8, tag="derivative-factor",
                                            context=f"symbol bound equals closed form, lambda={lam}")
                return [rep, same]

            jobs.append(trial)
    return jobs


def vdw(cfg: SuiteConfig) -> List[Job]:
    rng = np.random.default_rng(cfg.seed)
    jobs: List[Job] = []
    for n in cfg.n or [2, 3, 4, 5, 6]:
        if cfg.matrix == "uniform":
            M = C.NonnegMatrix.uniform(n)
        elif cfg.matrix == "identity":
            M = C.NonnegMatrix.identity(n)
        elif cfg.matrix == "random":
            M = C.sinkhorn(rng.random((n, n)) + 0.05)
        else:
            raise ValueError(f"unknown matrix kind {cfg.matrix!r}")

        def job(M=M, n=n):
            chain = C.vdw_chain(M)
            agree = BoundReport.equality(chain.permanent, chain.ryser, exact=M.exact,
                                         tol=1e-9, tag="permanent",
                                         context=f"derivative chain vs Ryser, n={n}")
            prod = BoundReport.equality(C.vdw_product(n), Fraction(math.factorial(n), n ** n),
                                        exact=True, tag="van-der-waerden",
                                        context=f"prod ((k-1)/k)^(k-1) = n!/n^n, n={n}")
            return [chain.bound, agree, prod]

        jobs.append(job)
    return jobs


def csikvari(cfg: SuiteConfig) -> List[Job]:
    rng = np.random.default_rng(cfg.seed)
    jobs: List[Job] = []
    half = cfg.max_vertices // 2
    if half < 1:
        raise ValueError("max-vertices must be at least 2")
    for _ in range(cfg.trials):
        n = int(rng.integers(1, half + 1))
        d = int(rng.integers(1, n + 1))
        G = C.random_regular_bipartite(n, d, rng)

        def job(G=G, n=n, d=d):
            mus = C.matching_numbers(G)
            out = []
            for k in range(n + 1):
                bound = C.csikvari_bound(G, k)
                exact = mus[k] - C.csikvari_bound_exact(G, k)
                out.append(BoundReport.inequality(mus[k], bound, tol=cfg.tol, tag="csikvari",
                                                  context=f"{d}-regular n={n} k={k}",
                                                  exact_slack=exact))
            return out

        jobs.append(job)
    return jobs


def schrijver(cfg: SuiteConfig) -> List[Job]:
    rng = np.random.default_rng(cfg.seed)
    jobs: List[Job] = []
    for n in range(1, cfg.max_vertices // 2 + 1):
        for d in range(1, n + 1):
            G = C.random_regular_bipartite(n, d, rng)

            def job(G=G, n=n, d=d):
                mus = C.matching_numbers(G)
                out = []
                for k in range(n + 1):
                    s = C.schrijver_bound(n, d, k)
                    out.append(BoundReport.equality(s, C.csikvari_bound((n, n, d, d), k), tol=1e-12,
                                                    tag="schrijver",
                                                    context=f"n={n} d={d} k={k} vs general form"))
                    out.append(BoundReport.inequality(mus[k], s, tol=cfg.tol, tag="schrijver",
                                                      context=f"{d}-regular n={n} k={k}"))
                return out

            jobs.append(job)
    return jobs


def innerprod(cfg: SuiteConfig) -> List[Job]:
    rng = np.random.default_rng(cfg.seed)
    jobs: List[Job] = []

    def tight():
        x = SparsePoly.univariate([1, 1])
        rep = O.verify_inner_product_bound(x, x, (1,), [Fraction(1, 2)], tol=cfg.tol,
                                           override_stability=cfg.override_stability)
        return [rep, BoundReport.equality(rep.lhs, rep.rhs, tol=1e-15, tag="inner-product-bounded",
                                          context="<1+x,1+x>^1 equality case")]

    jobs.append(tight)
    for t in range(cfg.trials):
        n = len(cfg.alpha) if cfg.alpha else int(rng.integers(1, 4))
        lam = tuple(cfg.lam) if cfg.lam and len(cfg.lam) == n else \
            tuple(int(rng.integers(1, 4)) for _ in range(n))
        p = random_profile_product(rng, lam)
        q = random_profile_product(rng, lam)
        if cfg.alpha:
            alpha = list(cfg.alpha)
        else:
            top = [min(a, b) for a, b in zip(p.degrees(), q.degrees())]
            alpha = [Fraction(int(rng.integers(0, 4 * m + 1)), 4 * max(1, n)) for m in top]
        trans = t % 2 == 1
        seed = int(rng.integers(2**31))

        def job(p=p, q=q, lam=lam, alpha=alpha, trans=trans, seed=seed):
            return [O.verify_inner_product_bound(p, q, None if trans else lam, alpha, seed=seed,
                                                 tol=cfg.tol,
                                                 override_stability=cfg.override_stability)]

        jobs.append(job)
    return jobs


def _random_operator(rng, p: SparsePoly, out_arity: Optional[int]):
    lam = p.degrees()
    n = p.arity
    choices = ["identity", "boxplus", "matching", "derivative", "derivative_trans"]
    if n == 1:
        choices.remove("derivative")
    if out_arity is not None:
        allowed = {"identity": n, "boxplus": n, "matching": 0, "derivative": n - 1,
                   "derivative_trans": n - 1}
        choices = [c for c in choices if allowed[c] == out_arity]
        if not choices:
            raise ValueError(f"no built-in operator maps arity {n} to arity {out_arity}")
    kind = choices[int(rng.integers(len(choices)))]
    if kind == "identity":
        return O.identity(lam), "bounded"
    if kind == "boxplus":
        return O.boxplus(_stable_univariate_product(rng, n, lam), lam), "bounded"
    if kind == "matching":
        return O.matching_operator(n, int(rng.integers(0, n + 1)), lam), "bounded"
    k = int(rng.integers(n))
    value = 0 if rng.random() < 0.5 else rand_q(rng, 0, 2, 4)
    if kind == "derivative":
        return O.derivative_at(k, value, lam), "bounded"
    return O.derivative_at(k, 0, n=n, order=max(p.total_degree(), 1) + 4), "trans"


def compatible_beta(rng: np.random.Generator, T: O.LinearOperator, alpha) -> List[Fraction]:
    """A ``beta`` with ``(alpha, beta)`` in the Newton polytope of the symbol of ``T``.

    Averages two random vertex solutions of ``sum_j w_j z_j = alpha`` over the
    symbol's support; None if ``alpha`` is outside the projection.
    """
    S = O.symbol_bounded(T) if T.bounded else O.symbol_trans_truncated(T, T.order)
    n = T.in_arity
    pts = S.support()
    heads = [e[:n] for e in pts]
    picks = []
    for _ in range(2):
        cost = [int(c) for c in rng.integers(-5, 6, size=len(pts))]
        w = convex_weights(heads, alpha, cost)
        if w is None:
            return None
        picks.append(w)
    w = [(a + b) / 2 for a, b in zip(*picks)]
    return [sum(wj * e[n + k] for wj, e in zip(w, pts)) for k in range(T.out_arity)]


def _preserver_exponents(rng, cfg: SuiteConfig, T: O.LinearOperator, p: SparsePoly, tries: int = 8):
    # Operators such as a derivative at 0 pin some coordinates of alpha, so
    # alternate hull points with support points and keep the first alpha that
    # admits a compatible beta; otherwise the instance stays trivial.
    if cfg.beta is not None:
        return (list(cfg.alpha) if cfg.alpha else random_hull_point(rng, p)), list(cfg.beta)
    for t in range(tries):
        if cfg.alpha:
            alpha = list(cfg.alpha)
        elif t % 2 == 0:
            alpha = random_hull_point(rng, p)
        else:
            pts = p.support()
            alpha = [Fraction(v) for v in pts[int(rng.integers(len(pts)))]]
        beta = compatible_beta(rng, T, alpha)
        if beta is not None:
            return alpha, beta
        if cfg.alpha:
            break
    return alpha, [Fraction(0)] * T.out_arity


def preserver(cfg: SuiteConfig) -> List[Job]:
    rng = np.random.default_rng(cfg.seed)
    jobs: List[Job] = []
    for _ in range(cfg.trials):
        n = len(cfg.alpha) if cfg.alpha else int(rng.integers(1, 4))
        p = random_affine_product(rng, n, int(rng.integers(1, 5)))
        T, mode = _random_operator(rng, p, len(cfg.beta) if cfg.beta is not None else None)
        alpha, beta = _preserver_exponents(rng, cfg, T, p)
        seed = int(rng.integers(2**31))

        def job(T=T, p=p, alpha=alpha, beta=beta, mode=mode, seed=seed):
            return [O.verify_preservation(T, p, alpha, beta, mode=mode, seed=seed, tol=cfg.tol,
                                          override_stability=cfg.override_stability)]

        jobs.append(job)
    return jobs


def conjecture(cfg: SuiteConfig) -> List[Job]:
    rng = np.random.default_rng(cfg.seed)
    jobs: List[Job] = []
    for _ in range(cfg.trials):
        n = len(cfg.alpha) if cfg.alpha else int(rng.integers(1, 4))
        d = int(sum(cfg.alpha)) if cfg.alpha else int(rng.integers(1, 4))
        p = random_affine_product(rng, n, d, homogeneous=True)
        q = random_affine_product(rng, n, d, homogeneous=True)
        alpha = list(cfg.alpha) if cfg.alpha else random_hull_point(rng, p)
        jobs.append(lambda p=p, q=q, alpha=alpha: [O.homogeneous_conjecture_probe(p, q, alpha)])
    return jobs


SUITES = {
    "derivative": derivative,
    "gurvits": derivative,  # public alias
    "vdw": vdw,
    "csikvari": csikvari,
    "schrijver": schrijver,
    "innerprod": innerprod,
    "preserver": preserver,
    "conjecture": conjecture,
}


def experiment_rows(grid: List[dict], seed: int, max_vertices: int) -> List[dict]:
    """Matching counts against the bound over ``(m, n, a, b, k)`` grid points.

    One random graph is drawn per ``(m, n, a, b)``; ``mu_k`` is exact when
    ``m + n <= max_vertices`` and ``None`` otherwise.
    """
    rng = np.random.default_rng(seed)
    graphs: Dict[tuple, Optional[List[int]]] = {}
    rows = []
    for point in grid:
        m, n, a, b, k = (point[key] for key in ("m", "n", "a", "b", "k"))
        key = (m, n, a, b)
        if key not in graphs:
            if m + n <= max_vertices:
                G = C.random_regular_bipartite(n, a, rng) if m == n and a == b else \
                    C.random_biregular(m, n, a, b, rng)
                graphs[key] = C.matching_numbers(G)
            else:
                graphs[key] = None
        bound = C.csikvari_bound((m, n, a, b), k)
        mus = graphs[key]
        mu = mus[k] if mus is not None else None
        rows.append({"params": point, "mu_k": mu, "csikvari_bound": bound,
                     "ratio": None if mu is None or bound == 0 else mu / bound})
    return rows
