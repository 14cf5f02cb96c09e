"""Conversions between spherical and Gaussian designs, and coordinate projection.

All conversions run in binary64: the radial nodes are irrational in general.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.spatial import cKDTree

from .kernel import DesignError, WeightedPointSet, infer_kind
from .moments import radial_moment
from .quad1d import radial_design
from .verify import DEFAULT_TOL, verify_design

MERGE_TOL = 1e-12


class NotADesign(DesignError):
    pass


class OriginPoint(DesignError):
    pass


class BadDimension(DesignError):
    pass


def _pivalue_float(v) -> float:
    return float(v.coeff) * math.pi ** (v.e / 2)


def _output_kind(weights: np.ndarray, source_kind: str) -> str:
    if source_kind == "signed" or np.any(weights <= 0):
        return "signed"
    kind = infer_kind(list(weights))
    return kind


def merge_coincident(points: np.ndarray, weights: np.ndarray, tol: float = MERGE_TOL):
    """Collapse points closer than ``tol``, summing their weights.

    Each cluster keeps its first member as representative. Clusters whose
    weights cancel to (numerical) zero are removed.
    """
    n = len(points)
    groups = DisjointSet(range(n))
    for i, j in cKDTree(points).query_pairs(tol):
        groups.merge(i, j)
    reps, sums = [], []
    for subset in sorted(groups.subsets(), key=min):
        idx = sorted(subset)
        reps.append(idx[0])
        sums.append(math.fsum(weights[idx]))
    sums = np.array(sums)
    scale = np.abs(weights).max() if n else 1.0
    keep = np.abs(sums) > 1e-14 * scale
    return points[np.array(reps)][keep], sums[keep]


def spherical_to_gaussian(X: WeightedPointSet, t: int, check: bool = True) -> WeightedPointSet:
    """Gaussian t-design ``{r_i x}`` from a spherical t-design, with ``r_i`` the
    Gauss nodes of the radial law and weights ``beta_i w(x)``."""
    if X.measure != "sphere":
        raise ValueError("input must be a spherical point set")
    if check:
        rep = verify_design(X, t, "float", DEFAULT_TOL)
        if not rep.passed:
            raise NotADesign(f"input fails strength {t}: residual {rep.max_residual():.2e} "
                             f"at {rep.worst_monomial}")
    quad = radial_design(X.dimension, t)
    pts, w = X.float_points(), X.float_weights()
    out_pts = np.concatenate([r * pts for r in quad.nodes])
    out_w = np.concatenate([b * w for b in quad.weights])
    out_w = out_w / math.fsum(out_w)
    return WeightedPointSet(out_pts, out_w, "gaussian", _output_kind(out_w, X.kind), t)


def gaussian_to_spherical(X: WeightedPointSet, t: int) -> WeightedPointSet:
    """Spherical t-design from a Gaussian t-design.

    Every point moves to its direction with weight ``w(x) |x|^s / E|x|^s``,
    ``s = 2 floor(t/2)``; coincident directions are merged and the result is
    symmetrized under ``x -> -x``. When ``s >= 2`` a point at the origin
    carries weight exactly 0 and is dropped; for ``s = 0`` it has no
    direction and raises ``OriginPoint``.
    """
    if X.measure != "gaussian":
        raise ValueError("input must be a Gaussian point set")
    if t < 0:
        raise ValueError("t must be nonnegative")
    s = 2 * (t // 2)
    pts, w = X.float_points(), X.float_weights()
    norms = np.linalg.norm(pts, axis=1)
    at_origin = norms == 0
    if at_origin.any():
        if s == 0:
            raise OriginPoint(f"point {int(np.argmax(at_origin))} is at the origin")
        pts, w, norms = pts[~at_origin], w[~at_origin], norms[~at_origin]
        if len(pts) == 0:
            raise OriginPoint("every point is at the origin")
    dirs = pts / norms[:, None]
    new_w = w * norms**s / _pivalue_float(radial_moment(s, X.dimension))
    dirs, new_w = merge_coincident(dirs, new_w)
    dirs = np.concatenate([dirs, -dirs])
    new_w = np.concatenate([new_w, new_w]) / 2
    dirs, new_w = merge_coincident(dirs, new_w)
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    new_w = new_w / math.fsum(new_w)
    return WeightedPointSet(dirs, new_w, "sphere", _output_kind(new_w, X.kind), t)


def project_gaussian(X: WeightedPointSet, k: int) -> WeightedPointSet:
    """Keep the first ``k`` coordinates. Gaussian designs survive projection."""
    if X.measure != "gaussian":
        raise ValueError("input must be a Gaussian point set")
    if not 1 <= k <= X.dimension:
        raise BadDimension(f"need 1 <= k <= {X.dimension}, got {k}")
    if k == X.dimension:
        return X
    pts = X.points[:, :k]
    return WeightedPointSet(pts, X.weights, "gaussian", X.kind, X.strength)


def project_spherical(X: WeightedPointSet, k: int, t: int, check: bool = True) -> WeightedPointSet:
    """Spherical t-design in ``R^k`` via lift to Gaussian space, projection and normalization."""
    G = spherical_to_gaussian(X, t, check=check)
    return gaussian_to_spherical(project_gaussian(G, k), t)
