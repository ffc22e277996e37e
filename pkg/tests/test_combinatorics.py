import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capkit import combinatorics as C
from capkit.poly import SparsePoly

from oracles import brute_matchings, brute_permanent, rook_numbers


@st.composite
def bipartite_graphs(draw, max_side=4):
    m = draw(st.integers(1, max_side))
    n = draw(st.integers(1, max_side))
    all_edges = [(i, j) for i in range(m) for j in range(n)]
    edges = draw(st.sets(st.sampled_from(all_edges)))
    return C.BipartiteGraph(m, n, frozenset(edges))


def test_product_polynomial_of_ones():
    p = C.product_polynomial(C.NonnegMatrix.from_rows([[1, 1], [1, 1]]))
    assert p == SparsePoly.linear_form([1, 1]) ** 2


def test_matching_numbers_small():
    assert C.matching_numbers(C.BipartiteGraph.complete(2, 2)) == [1, 4, 2]
    assert C.matching_numbers(C.BipartiteGraph.complete(3, 3)) == [1, 9, 18, 6]
    assert C.count_matchings(C.BipartiteGraph.complete(3, 3), 3) == 6
    with pytest.raises(ValueError):
        C.count_matchings(C.BipartiteGraph.complete(2, 2), 3)


@pytest.mark.parametrize("n", range(1, 7))
def test_complete_graph_rook_numbers(n):
    assert C.matching_numbers(C.BipartiteGraph.complete(n, n)) == rook_numbers(n)


@given(bipartite_graphs())
@settings(max_examples=60, deadline=None)
def test_matchings_agree_with_brute_force(G):
    mus = C.matching_numbers(G)
    brute = brute_matchings(G.left, G.edges)
    size = min(G.left, G.right)
    assert mus == brute[:size + 1]


@given(bipartite_graphs(), st.data())
@settings(max_examples=60, deadline=None)
def test_deletion_contraction(G, data):
    if not G.edges:
        return
    e = data.draw(st.sampled_from(sorted(G.edges)))
    mus = C.matching_numbers(G)
    minus = C.matching_numbers(G.without_edge(e))
    contracted = C.matching_numbers(G.without_vertices(*e))
    for k in range(1, len(mus)):
        assert mus[k] == minus[k] + contracted[k - 1]


def test_permanent_values():
    assert C.permanent(C.NonnegMatrix.uniform(3)) == Fraction(2, 9)
    assert C.permanent(C.NonnegMatrix.identity(4)) == 1


@given(st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 3), min_size=n, max_size=n), min_size=n, max_size=n)))
@settings(max_examples=50, deadline=None)
def test_ryser_matches_permutation_sum(rows):
    M = C.NonnegMatrix.from_rows([[Fraction(v) for v in r] for r in rows])
    assert C.permanent(M) == brute_permanent(rows)


def test_vdw_extremal_chain():
    chain = C.vdw_chain(C.NonnegMatrix.uniform(3), with_steps=True)
    assert chain.permanent == Fraction(2, 9) == chain.ryser
    assert chain.bound.exact_slack == 0
    assert chain.holds and len(chain.steps) == 2


@pytest.mark.parametrize("n", range(2, 8))
def test_vdw_product_identity(n):
    assert C.vdw_product(n) == Fraction(math.factorial(n), n ** n)


def test_sinkhorn_and_capacity():
    rng = np.random.default_rng(0)
    M = C.sinkhorn(rng.random((4, 4)) + 0.1)
    assert M.is_doubly_stochastic()
    assert C.doubly_stochastic_capacity_check(M).holds
    assert C.permanent(M) >= 24 / 256
    ones = C.NonnegMatrix.from_rows([[1] * 3] * 3)
    assert C.ab_stochastic_capacity_check(ones, 3, 3).lhs == pytest.approx(27.0)
    wide = C.NonnegMatrix.from_rows([[1] * 4] * 2)
    assert C.ab_stochastic_capacity_check(wide, 4, 2).lhs == pytest.approx(16.0)


def test_csikvari_examples():
    assert C.csikvari_bound_exact((3, 3, 3, 3), 3) == Fraction(64, 27)
    assert C.csikvari_bound((2, 2, 2, 2), 1) == pytest.approx(3.375)
    assert C.schrijver_bound(2, 2, 1) == pytest.approx(3.375)


@pytest.mark.parametrize("n, d", [(n, d) for n in range(1, 7) for d in range(1, n + 1)])
def test_schrijver_is_special_case(n, d):
    for k in range(n + 1):
        assert C.schrijver_bound(n, d, k) == pytest.approx(C.csikvari_bound((n, n, d, d), k),
                                                           rel=1e-12)


def test_matching_symbol_matches_factored_form():
    sym = C.matching_operator_symbol(2, 1, 1)
    assert sym.symbol == SparsePoly(2, {(1, 0): 1, (0, 1): 1, (1, 1): 2})
    assert sym.identity.holds and sym.stability.passed
    for n, k, b in [(3, 2, 2), (3, 3, 1), (2, 2, 3)]:
        assert C.matching_operator_symbol(n, k, b, trials=20).identity.holds


def test_derivation_chain_on_complete_graph():
    G = C.BipartiteGraph.complete(3, 3)
    reps = C.csikvari_derivation_check(G, 1)
    assert reps[0].lhs == 81 and reps[0].exact_slack == 0
    assert C.matching_capacity_closed_form(3, 3, 3, 1) == pytest.approx(65536 / 729)
    for k in range(4):
        assert all(r.holds for r in C.csikvari_derivation_check(G, k))


def test_symbol_diagonal_matches_full_symbol():
    from capkit import poly as P
    from capkit.operators import symbol_bounded

    T = C.matching_operator(3, 2, (2, 2, 2))
    assert C.symmetric_symbol_diagonal(T, 2) == P.diagonal(symbol_bounded(T))


@pytest.mark.parametrize("n, d", [(4, 1), (5, 3), (6, 5), (8, 4)])
def test_random_regular_graphs_are_regular(n, d):
    G = C.random_regular_bipartite(n, d, np.random.default_rng(n * 10 + d))
    assert set(G.left_degrees()) == {d} == set(G.right_degrees())


@pytest.mark.parametrize("m, n, a, b", [(2, 4, 2, 1), (3, 6, 4, 2), (4, 6, 3, 2)])
def test_random_biregular_graphs(m, n, a, b):
    G = C.random_biregular(m, n, a, b, np.random.default_rng(1))
    assert G.degrees() == (a, b)


@pytest.mark.parametrize("m, n, a, b", [(4, 4, 2, 2), (3, 6, 4, 2), (5, 5, 5, 5), (2, 4, 2, 1)])
def test_float_bound_tracks_exact_bound(m, n, a, b):
    assert C.csikvari_bound((m, n, a, b), 0) == 1.0
    for k in range(m + 1):
        exact = float(C.csikvari_bound_exact((m, n, a, b), k))
        assert C.csikvari_bound((m, n, a, b), k) == pytest.approx(exact, rel=1e-13)
