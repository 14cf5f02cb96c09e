from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from designforge.builders import cross_polytope, gaussian_product_design, signed_design
from designforge.kernel import WeightedPointSet
from designforge.verify import ExactUnsupported, verify_design, verify_odd_vanishing


def test_cross_polytope_reports():
    X = cross_polytope(3)
    rep = verify_design(X, 3, "exact")
    assert rep.passed and rep.max_residual() == 0
    rep = verify_design(X, 4, "exact")
    assert not rep.passed
    assert rep.worst_monomial == (4, 0, 0) and rep.worst_residual == Fraction(2, 15)
    assert "result: FAIL" in rep.summary()


@pytest.mark.parametrize("d", range(2, 11))
def test_cross_polytope_fourth_moment(d):
    rep = verify_design(cross_polytope(d), 4, "exact")
    assert rep.worst_residual == Fraction(d - 1, d * (d + 2))
    # 1/d - 3/(d(d+2)) = (d-1)/(d(d+2))


def test_product_design_float():
    X = gaussian_product_design(3, 3, 2, seed=0)
    assert verify_design(X, 3, "float", 1e-9).passed
    with pytest.raises(ExactUnsupported):
        verify_design(X, 3, "exact")


def test_odd_vanishing():
    D = signed_design(4, 2, "sphere", seed=0).materialize()
    assert verify_odd_vanishing(D, 8).passed
    single = WeightedPointSet(np.array([[1.0, 0.0, 0.0]]), np.array([1.0]), "sphere", "unweighted")
    rep = verify_odd_vanishing(single, 1)
    assert not rep.passed and rep.worst_monomial == (1, 0, 0)
    assert verify_odd_vanishing(cross_polytope(4), 5).passed


def test_exact_and_float_agree():
    fixtures = [(cross_polytope(d), t) for d in (1, 2, 3, 5) for t in (2, 3, 4)]
    fixtures += [(signed_design(3, 1, "sphere", seed=0).materialize(), t) for t in (2, 3)]
    for X, t in fixtures:
        assert verify_design(X, t, "exact").passed == verify_design(X.to_float(), t, "float", 1e-8).passed


def test_monotone_in_strength():
    X = cross_polytope(4).to_float()
    passed = [verify_design(X, t, "float").passed for t in range(7)]
    assert passed == sorted(passed, reverse=True)


@given(st.permutations(range(4)))
@settings(max_examples=24, deadline=None)
def test_coordinate_permutation_invariance(perm):
    X = signed_design(4, 1, "sphere", seed=0).materialize().to_float()
    rng = np.random.default_rng(0)
    noisy = X.points + 1e-3 * rng.standard_normal(X.points.shape)
    noisy /= np.linalg.norm(noisy, axis=1, keepdims=True)
    Y = WeightedPointSet(noisy, X.weights, "sphere", X.kind)
    Z = WeightedPointSet(noisy[:, list(perm)], X.weights, "sphere", X.kind)
    a, b = verify_design(Y, 4, "float"), verify_design(Z, 4, "float")
    assert a.passed == b.passed
    assert np.allclose(a.per_degree_max_residual, b.per_degree_max_residual, rtol=1e-12, atol=1e-15)
