import math

import numpy as np
import pytest

from designforge.moments import gaussian_moment, radial_moment
from designforge.quad1d import (
    HankelNotPD,
    NoSolution,
    gauss_quadrature,
    gaussian_1d_moments,
    radial_design,
    radial_moments,
    unweighted_1d_gaussian_design,
)


def test_gaussian_one_and_two_nodes():
    q1 = gauss_quadrature(gaussian_1d_moments(2), 1)
    assert q1.nodes[0] == pytest.approx(0, abs=1e-15) and q1.weights[0] == pytest.approx(1)
    q2 = gauss_quadrature(gaussian_1d_moments(4), 2)
    assert q2.nodes == pytest.approx([-(2 * math.pi) ** -0.5, (2 * math.pi) ** -0.5], rel=1e-14)
    assert q2.weights == pytest.approx([0.5, 0.5], rel=1e-14)


@pytest.mark.parametrize("n", range(1, 9))
def test_gaussian_nodes_match_hermite_oracle(n):
    # exp(-pi x^2): substitute y = sqrt(pi) x in the physicists' Hermite rule
    y, w = np.polynomial.hermite.hermgauss(n)
    q = gauss_quadrature(gaussian_1d_moments(2 * n), n)
    assert np.allclose(q.nodes, y / math.sqrt(math.pi), atol=1e-12)
    assert np.allclose(q.weights, w / w.sum(), atol=1e-12)


def test_radial_examples():
    r = radial_design(3, 1)
    assert len(r) == 1
    assert r.nodes[0] == pytest.approx(2 / math.pi, rel=1e-14)
    assert r.weights[0] == pytest.approx(1.0)
    assert len(radial_design(1, 0)) == 1


@pytest.mark.parametrize("d", range(1, 7))
@pytest.mark.parametrize("t", range(0, 9))
def test_radial_design_matches_moments(d, t):
    r = radial_design(d, t)
    assert len(r) == math.ceil((t + 1) / 2)
    assert all(w > 0 for w in r.weights)
    for k in range(r.matched_degree + 1):
        m = float(radial_moment(k, d))
        assert abs(r.moment(k) - m) <= 1e-10 * max(1.0, abs(m))


def test_hankel_breakdown():
    # a point mass at 0 has a singular Hankel matrix beyond n = 1
    with pytest.raises(HankelNotPD):
        gauss_quadrature([1, 0, 0, 0], 2)


def test_moments_must_be_normalized():
    with pytest.raises(ValueError):
        gauss_quadrature([2, 0, 1, 0], 2)


def test_unweighted_search_examples():
    assert unweighted_1d_gaussian_design(1, 1, 0) == [0.0]
    pts = unweighted_1d_gaussian_design(3, 2, 0)
    assert pts == pytest.approx([-(2 * math.pi) ** -0.5, (2 * math.pi) ** -0.5], rel=1e-12)
    with pytest.raises(NoSolution):
        unweighted_1d_gaussian_design(5, 4, 0)


@pytest.mark.parametrize("t,q", [(3, 3), (3, 4), (5, 6), (5, 8), (7, 22)])
def test_unweighted_search_succeeds(t, q):
    pts = unweighted_1d_gaussian_design(t, q, 1)
    assert len(pts) == q
    for k in range(1, t + 1):
        target = float(gaussian_moment((k,)))
        assert abs(math.fsum(x**k for x in pts) / q - target) <= 1e-10


def test_radial_moments_helper():
    ms = radial_moments(3, 3)
    assert float(ms[2]) == pytest.approx(float(radial_moment(2, 3)))
