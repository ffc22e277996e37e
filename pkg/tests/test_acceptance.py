"""The eleven acceptance criteria, each at its stated tolerance and time budget."""

import math
import time
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from capkit import combinatorics as C
from capkit import operators as O
from capkit import poly as P
from capkit.capacity import capacity, capacity_of_truncation_sequence, cpc
from capkit.poly import SparsePoly
from capkit.stability import strong_rayleigh_check
from capkit.suites import rand_q, random_hull_point, random_profile_product


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.2f}s, budget {self.seconds}s"


def test_criterion_1_closed_form_capacity():
    rng = np.random.default_rng(101)
    worst = 0.0
    with Budget(5):
        for _ in range(100):
            n = int(rng.integers(1, 5))
            m = int(rng.integers(1, 6))
            c = [rand_q(rng, 0.25, 3) for _ in range(n)]
            # alpha on the simplex of total m, rational, occasionally with zeros
            cuts = sorted(rand_q(rng, 0, m, den=12) for _ in range(n - 1))
            alpha = [b - a for a, b in zip([Fraction(0)] + cuts, cuts + [Fraction(m)])]
            p = SparsePoly.linear_form(c) ** m
            value = capacity(p, alpha).value
            closed = math.exp(sum(float(a) * math.log(m * float(ci) / float(a))
                                  for ci, a in zip(c, alpha) if a > 0))
            worst = max(worst, abs(value - closed) / closed)
    assert worst <= 1e-8, worst


def test_criterion_2_doubly_stochastic_capacity():
    rng = np.random.default_rng(202)
    worst = 0.0
    with Budget(30):
        for _ in range(50):
            n = int(rng.integers(1, 7))
            M = C.sinkhorn(rng.random((n, n)) + 0.05)
            worst = max(worst, abs(cpc(C.product_polynomial(M), [1] * n) - 1))
    assert worst <= 1e-6, worst


def test_criterion_3_derivative_tightness():
    for lam in range(2, 9):
        p = SparsePoly.univariate([1, 1]) ** lam
        T = O.derivative_at_zero(0, (lam,))
        ratio = cpc(O.apply(T, p), []) / cpc(p, [1])
        factor = ((lam - 1) / lam) ** (lam - 1)
        assert abs(ratio - factor) <= 1e-9
        bound = O.preservation_bound_bounded(T, None, [1], [])
        assert abs(bound - factor) <= 1e-9


def test_criterion_4_van_der_waerden_extremal():
    with Budget(1):
        for n in range(2, 8):
            target = Fraction(math.factorial(n), n ** n)
            assert C.permanent(C.NonnegMatrix.uniform(n)) == target
            assert C.vdw_product(n) == target


def test_criterion_5_csikvari_regular():
    rng = np.random.default_rng(505)
    rows = 0
    with Budget(60):
        for _ in range(50):
            n = int(rng.integers(1, 9))
            d = int(rng.integers(1, n + 1))
            G = C.random_regular_bipartite(n, d, rng)
            mus = C.matching_numbers(G)
            for k in range(n + 1):
                assert mus[k] == C.count_matchings(G, k)
                assert mus[k] >= C.csikvari_bound(G, k) * (1 - 1e-12)
                assert mus[k] >= C.csikvari_bound_exact(G, k)
                rows += 1
        K33 = C.BipartiteGraph.complete(3, 3)
        assert C.csikvari_bound_exact(K33, 3) == Fraction(64, 27)
        assert C.count_matchings(K33, 3) == 6
    assert rows >= 50


def _biregular_params(limit=12):
    out = []
    for m in range(1, limit):
        for n in range(1, limit - m + 1):
            for a in range(1, n + 1):
                if (a * m) % n == 0 and 1 <= a * m // n <= m:
                    out.append((m, n, a, a * m // n))
    return out


def test_criterion_6_derivation_chain():
    rng = np.random.default_rng(606)
    params = _biregular_params()
    picks = rng.choice(len(params), size=20, replace=False)
    with Budget(60):
        for i in picks:
            m, n, a, b = params[i]
            G = C.random_biregular(m, n, a, b, rng)
            for k in range(min(m, n) + 1):
                identity, symbol_cap, assembled, bound = C.csikvari_derivation_check(G, k)
                assert identity.kind == "exact" and identity.exact_slack == 0, identity
                assert symbol_cap.holds and assembled.holds and bound.holds


def test_criterion_7_inner_product_bounds():
    rng = np.random.default_rng(707)
    half = Fraction(1, 2)
    one_plus_x = SparsePoly.univariate([1, 1])
    tight = O.verify_inner_product_bound(one_plus_x, one_plus_x, (1,), [half])
    assert tight.lhs == 2 and abs(tight.rhs - 2) <= 4 * np.finfo(float).eps
    nontrivial = 0
    with Budget(30):
        for _ in range(200):
            n = int(rng.integers(1, 4))
            lam = [int(rng.integers(1, 4)) for _ in range(n)]
            p = random_profile_product(rng, lam)
            alpha = random_hull_point(rng, p)
            for _ in range(10):
                q = random_profile_product(rng, lam)
                if cpc(q, alpha) > 0:
                    break
            rep = O.verify_inner_product_bound(p, q, lam, alpha, seed=int(rng.integers(2**31)))
            assert rep.slack >= -1e-7 * max(1.0, abs(rep.rhs)), rep
            nontrivial += not rep.trivial
    assert nontrivial >= 150


def _random_operator(rng):
    n = int(rng.integers(1, 3))
    m = int(rng.integers(0, 3))
    lam = tuple(int(rng.integers(1, 4)) for _ in range(n))
    action = {}
    for mu in O.box(lam):
        terms = {}
        for _ in range(int(rng.integers(0, 4))):
            e = tuple(int(rng.integers(0, 3)) for _ in range(m))
            terms[e] = rand_q(rng, 0, 3, den=6)
        action[mu] = SparsePoly(m, terms, P.RATIONAL)
    return O.LinearOperator(n, m, action, lam)


def test_criterion_8_symbol_identity():
    rng = np.random.default_rng(808)
    with Budget(10):
        for _ in range(50):
            T = _random_operator(rng)
            terms = {mu: rand_q(rng, 0, 2, den=5) for mu in O.box(T.profile) if rng.random() < 0.6}
            p = SparsePoly(T.in_arity, terms or {(0,) * T.in_arity: 1}, P.RATIONAL)
            x0 = [rand_q(rng, -2, 2, den=7) for _ in range(T.out_arity)]
            rep = O.symbol_identity_check(T, p, x0)
            assert rep.kind == "exact" and rep.exact_slack == 0, rep


def test_criterion_9_transcendental_limit():
    lams = [2 ** j for j in range(13)]
    with Budget(5):
        values = capacity_of_truncation_sequence(lambda mu: 1, [1], lams)
    for lam, v in zip(lams[1:], values[1:]):
        assert v == pytest.approx((lam / (lam - 1)) ** (lam - 1), rel=1e-9)
    assert all(b > a for a, b in zip(values, values[1:]))
    assert abs(values[-1] - math.e) <= 1e-3


def _stable_multiaffine(rng):
    """Product of linear forms over disjoint variable groups, or a weighted e_k."""
    n = int(rng.integers(2, 6))
    if rng.random() < 0.3:
        k = int(rng.integers(1, n + 1))
        w = [rand_q(rng, 0.25, 2) for _ in range(n)]
        terms = {}
        for S in combinations(range(n), k):
            e = tuple(int(i in S) for i in range(n))
            terms[e] = math.prod((w[i] for i in S), start=Fraction(1))
        return SparsePoly(n, terms)
    groups = rng.integers(0, int(rng.integers(1, n + 1)), size=n)
    p = SparsePoly.constant(n, 1)
    for g in set(groups.tolist()):
        coeffs = [rand_q(rng, 0.25, 2) if groups[i] == g else 0 for i in range(n)]
        p = p * SparsePoly.linear_form(coeffs, rand_q(rng, 0, 2))
    return p


def test_criterion_10_strong_rayleigh():
    rng = np.random.default_rng(1010)
    with Budget(10):
        for _ in range(100):
            p = _stable_multiaffine(rng)
            pts = [[rand_q(rng, -3, 3, den=8) for _ in range(p.arity)] for _ in range(20)]
            for i, j in combinations(range(p.arity), 2):
                rep = strong_rayleigh_check(p, i, j, pts)
                assert rep.exact_slack >= -1e-9, rep
        control = SparsePoly(2, {(0, 0): 1, (1, 1): 1})
        rep = strong_rayleigh_check(control, 0, 1, [[0, 0]])
        assert not rep.holds and rep.lhs == 0 and rep.rhs == 1


def test_criterion_11_boxplus_corollary():
    with Budget(30):
        for lam in [(1,), (2,), (3,), (1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (3, 2), (3, 3)]:
            closed = O.boxplus_symbol_closed_form(lam)
            normalized = O.symbol_bounded(O.boxplus_bilinear(lam, normalized=True))
            assert normalized == closed
            literal = O.symbol_bounded(O.boxplus_bilinear(lam))
            assert literal == closed * math.prod(math.factorial(l) for l in lam)

        rng = np.random.default_rng(1111)
        done = nontrivial = 0
        while done < 50:
            n = int(rng.integers(1, 3))
            lam = [int(rng.integers(1, 3)) for _ in range(n)]
            p = random_profile_product(rng, lam)
            q = random_profile_product(rng, lam)
            beta, gamma = random_hull_point(rng, p), random_hull_point(rng, q)
            if any(b + g < l for b, g, l in zip(beta, gamma, lam)):
                continue
            for normalized in (True, False):
                rep = O.verify_boxplus_corollary(p, q, lam, beta, gamma, normalized=normalized)
                assert rep.slack >= -1e-7 * max(1.0, abs(rep.rhs)), rep
            nontrivial += not rep.trivial
            done += 1
    assert nontrivial >= 40
