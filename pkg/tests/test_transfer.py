import math

import numpy as np
import pytest

from designforge.approx import uniform_sphere
from designforge.builders import caratheodory_prune, cross_polytope, fit_weights_on_pool, gaussian_product_design
from designforge.gegenbauer import dim_P_sphere
from designforge.kernel import WeightedPointSet
from designforge.transfer import (
    BadDimension,
    NotADesign,
    OriginPoint,
    gaussian_to_spherical,
    project_gaussian,
    project_spherical,
    spherical_to_gaussian,
)
from designforge.verify import verify_design


def _pool_design(d, t, seed):
    pool = uniform_sphere(4 * dim_P_sphere(d, t), d, np.random.default_rng(seed))
    return caratheodory_prune(fit_weights_on_pool(pool, "sphere", t), t)


def test_s2g_cross_polytope():
    G = spherical_to_gaussian(cross_polytope(3), 3)
    assert len(G) == 12
    assert verify_design(G, 3, "float", 1e-8).passed


def test_s2g_single_node():
    X = WeightedPointSet(np.array([[1.0], [-1.0]]), np.array([0.5, 0.5]), "sphere", "unweighted")
    G = spherical_to_gaussian(X, 1)
    # for d = 1 the radial law is |N(0, 1/(2 pi))|, with mean 1/pi
    assert np.allclose(np.sort(G.points[:, 0]), [-1 / math.pi, 1 / math.pi])


def test_s2g_rejects_non_design():
    with pytest.raises(NotADesign):
        spherical_to_gaussian(cross_polytope(3), 4)
    G = spherical_to_gaussian(cross_polytope(3), 4, check=False)
    assert not verify_design(G, 4, "float", 1e-8).passed


def test_g2s_examples():
    S = gaussian_to_spherical(spherical_to_gaussian(cross_polytope(3), 3), 3)
    assert len(S) == 6
    assert np.allclose(np.sort(np.abs(S.points).sum(axis=1)), 1)
    d = 3
    a = math.sqrt(d / (2 * math.pi))
    orbit = WeightedPointSet(np.vstack([a * np.eye(d), -a * np.eye(d)]), np.full(6, 1 / 6), "gaussian", "unweighted")
    S = gaussian_to_spherical(orbit, 2)
    assert np.allclose(S.weights, 1 / 6) and S.kind == "unweighted"
    with pytest.raises(OriginPoint):
        gaussian_to_spherical(WeightedPointSet(np.zeros((1, 2)), np.ones(1), "gaussian", "unweighted"), 1)


@pytest.mark.parametrize("d", range(2, 7))
@pytest.mark.parametrize("t", range(1, 6))
def test_round_trip(d, t):
    X = cross_polytope(d).to_float() if t <= 3 else _pool_design(d, t, seed=d + t)
    G = spherical_to_gaussian(X, t)
    assert len(G) <= math.ceil((t + 1) / 2) * len(X)
    S = gaussian_to_spherical(G, t)
    assert len(S) <= 2 * len(G)
    assert verify_design(S, t, "float", 1e-8).passed
    assert np.all(S.weights > 0)


def test_product_design_to_sphere():
    G = gaussian_product_design(4, 3, 2, seed=0)
    S = gaussian_to_spherical(G, 3)
    assert verify_design(S, 3, "float", 1e-8).passed


def test_project_gaussian():
    G = gaussian_product_design(3, 3, 2, seed=0)
    assert project_gaussian(G, 3) is G
    P = project_gaussian(G, 2)
    assert P.dimension == 2 and len(P) == len(G)
    assert verify_design(P, 3, "float", 1e-9).passed
    with pytest.raises(BadDimension):
        project_gaussian(G, 0)
    with pytest.raises(BadDimension):
        project_gaussian(G, 4)


def test_project_spherical():
    X = cross_polytope(5)
    P = project_spherical(X, 3, 3)
    assert P.dimension == 3
    assert len(P) <= 40
    assert verify_design(P, 3, "float", 1e-8).passed
    same = project_spherical(X, 5, 3)
    assert len(same) == 10 and verify_design(same, 3, "float", 1e-8).passed
    # for s = 0 a point dropped to the origin has no direction
    with pytest.raises(OriginPoint):
        project_spherical(X, 3, 1)


def test_project_spherical_pool_design():
    X = _pool_design(5, 4, seed=11)
    P = project_spherical(X, 3, 4)
    assert len(P) <= 2 * math.ceil(5 / 2) * len(X)
    assert verify_design(P, 4, "float", 1e-8).passed
