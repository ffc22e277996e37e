from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from capkit.polytope import BOUNDARY, INTERIOR, OUTSIDE, convex_weights, membership

from oracles import hull_contains, minimal_face

square = [(0, 0), (1, 0), (0, 1), (1, 1)]


def test_square_cases():
    assert membership(square, [Fraction(1, 2)] * 2).status == INTERIOR
    edge = membership(square, [Fraction(1, 2), 0])
    assert edge.status == BOUNDARY
    assert set(edge.face) == {(0, 0), (1, 0)}
    out = membership(square, [2, 0])
    assert out.status == OUTSIDE
    c = out.separator
    assert all(sum(ci * m for ci, m in zip(c, mu)) >= c[0] * 2 + out.margin for mu in square)


def test_vertex_is_a_face():
    m = membership(square, [1, 1])
    assert m.status == BOUNDARY and m.face == ((1, 1),)


def test_univariate_and_degenerate():
    assert membership([(0,), (2,)], [1]).status == INTERIOR
    assert membership([(0,), (2,)], [2]).status == BOUNDARY
    assert membership([(0,), (2,)], [3]).status == OUTSIDE
    # a segment in the plane: relative interior counts as interior
    assert membership([(0, 0), (2, 2)], [1, 1]).status == INTERIOR
    assert membership([(0, 0), (2, 2)], [1, 0]).status == OUTSIDE


def test_convex_weights_reproduce_alpha():
    alpha = [Fraction(2, 3), Fraction(1, 3)]
    w = convex_weights(square, alpha)
    assert sum(w) == 1 and min(w) >= 0
    assert [sum(wi * mu[k] for wi, mu in zip(w, square)) for k in range(2)] == alpha


point_sets = st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2)),
                      min_size=1, max_size=7, unique=True)
targets = st.lists(st.fractions(min_value=0, max_value=3, max_denominator=3), min_size=3, max_size=3)


@given(point_sets, targets)
@settings(max_examples=80, deadline=None)
def test_membership_agrees_with_enumeration(pts, alpha):
    m = membership(pts, alpha)
    inside = hull_contains(pts, alpha)
    assert (m.status != OUTSIDE) == inside
    if inside:
        face = minimal_face(pts, alpha)
        assert set(m.face) == face
        assert (m.status == INTERIOR) == (face == set(pts))
    else:
        c, margin = m.separator, m.margin
        assert margin > 0
        ca = sum(ci * a for ci, a in zip(c, alpha))
        assert all(sum(ci * v for ci, v in zip(c, mu)) >= ca + margin for mu in pts)
