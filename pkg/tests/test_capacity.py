import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from capkit import poly as P
from capkit.capacity import (PRESERVER_IDENTITIES, CapacityError, capacity,
                             capacity_linear_power, capacity_of_truncation_sequence,
                             check_preserver_identity, cpc, log_partition)
from capkit.polytope import BOUNDARY, INTERIOR, OUTSIDE, newton_membership
from capkit.poly import SparsePoly

from oracles import grid_capacity
from strategies import affine_products, sparse_polys

one_plus_x = SparsePoly.univariate([1, 1])
x_plus_y = SparsePoly.linear_form([1, 1])


def test_log_partition_bernoulli():
    value, grad, hess = log_partition(one_plus_x, [0.0])
    assert value == pytest.approx(math.log(2))
    assert grad[0] == pytest.approx(0.5)
    assert hess[0, 0] == pytest.approx(0.25)


@pytest.mark.parametrize("p, alpha, expected", [
    (x_plus_y ** 2, [1, 1], 4.0),
    (one_plus_x ** 2, [1], 4.0),
    (x_plus_y ** 2, [2, 0], 1.0),
    (one_plus_x, [1], 1.0),
])
def test_frozen_values_agree_with_grid(p, alpha, expected):
    assert cpc(p, alpha) == pytest.approx(expected, rel=1e-9)
    # the grid is an upper bound; on boundary faces it gets within e^-8 scale terms
    assert grid_capacity(p, alpha) == pytest.approx(expected, rel=1e-3)


def test_status_and_minimiser():
    res = capacity(one_plus_x ** 2, [1])
    assert res.status == INTERIOR and res.converged
    assert np.exp(res.minimizer_log[0]) == pytest.approx(1.0)
    assert res.to_dict()["value"] == pytest.approx(4.0)
    edge = capacity(one_plus_x, [1])
    assert edge.status == BOUNDARY and edge.face == ((1,),)
    assert capacity(one_plus_x, [2]).value == 0.0
    assert capacity(one_plus_x, [2]).status == OUTSIDE


def test_capacity_errors():
    with pytest.raises(CapacityError):
        capacity(SparsePoly.zero(1), [1])
    with pytest.raises(CapacityError):
        capacity(one_plus_x, [1, 1])


def test_linear_power_boundary_uses_zero_power_convention():
    # The face {x1^2} carries coefficient 1 and (2*1/2)^2 * 1 = 1.
    assert capacity_linear_power([1, 1], [2, 0]) == pytest.approx(1.0)
    assert capacity_linear_power([1, 1], [1, 1]) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        capacity_linear_power([1, 1], [1, 1], m=3)


def test_truncation_sequence_values():
    one = lambda mu: 1
    vals = capacity_of_truncation_sequence(one, [1], [1, 100])
    assert vals[0] == pytest.approx(1.0)
    assert vals[1] == pytest.approx((100 / 99) ** 99, rel=1e-9)


@pytest.mark.parametrize("name, instance", [
    ("scaling", {"p": one_plus_x ** 2, "alpha": [1], "b": 3}),
    ("product", {"p": one_plus_x, "q": one_plus_x ** 2, "alpha": [Fraction(1, 2)], "beta": [1]}),
    ("disjoint_product", {"p": one_plus_x, "q": one_plus_x, "alpha": [1], "beta": [1]}),
    ("evaluation", {"p": SparsePoly.linear_form([1, 0], 1) * SparsePoly.linear_form([1, 1], 1),
                    "alpha": [1, 1], "y": 2}),
    ("external_field", {"p": x_plus_y ** 2, "alpha": [1, 1], "c": [2, 5]}),
    ("inversion", {"p": one_plus_x ** 2, "alpha": [1], "lam": [2]}),
    ("concavity", {"p": one_plus_x, "q": one_plus_x ** 2, "alpha": [1], "b": 1, "c": 2}),
    ("diagonalization", {"p": SparsePoly.linear_form([1, 2], 1) ** 2, "alpha": [1, Fraction(1, 2)]}),
    ("symmetric_diagonalization", {"p": x_plus_y ** 2, "alpha": [1, 1]}),
    ("homogenization", {"p": SparsePoly.univariate([0, 1]), "alpha": [1], "lam": [2]}),
    ("polarization", {"p": one_plus_x ** 2, "alpha": [1], "lam": [2]}),
])
def test_preserver_identities(name, instance):
    assert name in PRESERVER_IDENTITIES
    rep = check_preserver_identity(name, instance)
    assert rep.holds, rep


def test_disjoint_product_value():
    rep = check_preserver_identity("disjoint_product",
                                   {"p": one_plus_x, "q": one_plus_x, "alpha": [1], "beta": [1]})
    assert rep.lhs == pytest.approx(1.0)
    rep = check_preserver_identity("disjoint_product", {
        "p": one_plus_x, "q": one_plus_x, "alpha": [Fraction(1, 2)], "beta": [Fraction(1, 2)]})
    assert rep.lhs == pytest.approx(4.0)


def _hull_point(p, weights):
    pts = p.support()
    w = [Fraction(v) for v in weights[:len(pts)]] + [Fraction(1)] * max(0, len(pts) - len(weights))
    total = sum(w)
    return [sum(wi * mu[k] for wi, mu in zip(w, pts)) / total for k in range(p.arity)]


@given(affine_products(max_factors=3), st.lists(st.integers(1, 4), min_size=8, max_size=8))
@settings(max_examples=40, deadline=None)
def test_capacity_never_exceeds_grid_search(p, weights):
    alpha = _hull_point(p, weights)
    value = cpc(p, alpha)
    grid = grid_capacity(p, alpha)
    assert value <= grid * (1 + 1e-9)
    if newton_membership(p, alpha).status == INTERIOR:
        res = capacity(p, alpha)
        if np.all(np.abs(res.minimizer_log) < 6):
            assert value == pytest.approx(grid, rel=1e-3)


@given(sparse_polys(max_degree=3), st.lists(st.integers(1, 4), min_size=8, max_size=8),
       st.lists(st.sampled_from([Fraction(1, 2), 2, 3]), min_size=3, max_size=3))
@settings(max_examples=40, deadline=None)
def test_external_field_homogeneity(p, weights, c):
    alpha = _hull_point(p, weights)
    c = c[:p.arity]
    lhs = cpc(P.scale_variables(p, c), alpha)
    rhs = math.prod(float(ci) ** float(a) for ci, a in zip(c, alpha)) * cpc(p, alpha)
    assert lhs == pytest.approx(rhs, rel=1e-8)


@given(sparse_polys(max_degree=2), st.lists(st.integers(1, 4), min_size=8, max_size=8))
@settings(max_examples=30, deadline=None)
def test_outside_is_zero_and_inside_positive(p, weights):
    alpha = _hull_point(p, weights)
    assert cpc(p, alpha) > 0
    beyond = [a + max(p.degrees()) + 1 for a in alpha]
    assert cpc(p, beyond) == 0.0


@given(affine_products(max_factors=2), affine_products(max_factors=2),
       st.lists(st.integers(1, 4), min_size=8, max_size=8))
@settings(max_examples=25, deadline=None)
def test_product_supermultiplicative(p, q, weights):
    assume(p.arity == q.arity)
    alpha = _hull_point(p, weights)
    beta = _hull_point(q, weights[::-1])
    lhs = cpc(p * q, [a + b for a, b in zip(alpha, beta)])
    assert lhs >= cpc(p, alpha) * cpc(q, beta) * (1 - 1e-8)
