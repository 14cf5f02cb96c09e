"""L2-approximate and tensor-approximate spherical designs."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gegenbauer import DimensionTooSmall, dim_P_sphere, poly_eval, q_sum_coeffs
from .kernel import DesignError, WeightedPointSet, uniform_weights
from .moments import sphere_moment

MAX_RETRIES = 50
_ROW_BLOCK = 2048
_ROUNDING_FLOOR = 1e-13


class RetriesExhausted(DesignError):
    pass


class TooLarge(DesignError):
    pass


@dataclass(frozen=True)
class EpsilonCertificate:
    epsilon_achieved: float
    strength: int
    pair_sum: float
    method: str

    def summary(self) -> str:
        return (f"method: {self.method}\nstrength: {self.strength}\n"
                f"pair_sum: {self.pair_sum!r}\nepsilon: {self.epsilon_achieved!r}")


def _check_sphere(X: WeightedPointSet):
    if X.measure != "sphere":
        raise ValueError("input must be a spherical point set")


def _pair_sum(X: WeightedPointSet, f) -> float:
    """``sum_{x,y} w(x) w(y) f(<x,y>)``, one row block at a time.

    Results below the rounding floor of the summands are reported as 0.
    """
    pts, w = X.float_points(), X.float_weights()
    parts, mags = [], []
    for start in range(0, len(pts), _ROW_BLOCK):
        block = slice(start, start + _ROW_BLOCK)
        gram = pts[block] @ pts.T
        vals = f(np.clip(gram, -1.0, 1.0)) * w[block, None] * w[None, :]
        parts.append(math.fsum(vals.ravel()))
        mags.append(float(np.abs(vals).sum()))
    total = math.fsum(parts)
    if abs(total) <= _ROUNDING_FLOOR * math.fsum(mags):
        return 0.0
    return total


def epsilon_l2(X: WeightedPointSet, t: int) -> EpsilonCertificate:
    """L2 certificate from the pair sum of ``Q_1 + ... + Q_t``."""
    _check_sphere(X)
    if X.dimension < 3:
        raise DimensionTooSmall("L2 certificates need d >= 3")
    coeffs = q_sum_coeffs(t, X.dimension)
    s = _pair_sum(X, lambda g: poly_eval(coeffs, g))
    return EpsilonCertificate(math.sqrt(max(s, 0.0)), t, s, "l2-gegenbauer")


def uniform_sphere(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        g = rng.standard_normal((n, d))
        norms = np.linalg.norm(g, axis=1)
        if np.all(norms > 0):
            return g / norms[:, None]


def _sample_loop(k: int, d: int, seed: int, accept, max_retries: int) -> WeightedPointSet:
    for attempt in range(max_retries):
        rng = np.random.default_rng([seed, attempt])
        X = WeightedPointSet(uniform_sphere(k, d, rng), uniform_weights(k, False), "sphere", "unweighted")
        if accept(X):
            return X
    raise RetriesExhausted(f"no acceptable sample in {max_retries} attempts")


def l2_sample_size(d: int, t: int, epsilon: float) -> int:
    return max(1, math.ceil((dim_P_sphere(d, t) - 1) / epsilon**2))


def construct_l2_approx(d: int, t: int, epsilon: float, seed: int, max_retries: int = MAX_RETRIES) -> WeightedPointSet:
    """Unweighted epsilon-approximate t-design from ``ceil((r-1)/eps^2)`` uniform points."""
    if d < 3:
        raise DimensionTooSmall("L2 construction needs d >= 3")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    k = l2_sample_size(d, t, epsilon)
    X = _sample_loop(k, d, seed, lambda Y: epsilon_l2(Y, t).pair_sum <= epsilon**2, max_retries)
    return X.with_strength(t)


def tensor_constant(d: int, t: int) -> Fraction:
    """``c(d,t) = E_mu[x_1^{2t}]``."""
    if d < 1 or t < 1:
        raise ValueError("need d >= 1 and t >= 1")
    return sphere_moment((2 * t,) + (0,) * (d - 1), d)


def tensor_discrepancy(X: WeightedPointSet, t: int) -> float:
    """Frobenius distance between the order-2t moment tensors of X and of mu, via Gram sums."""
    _check_sphere(X)
    gram = _pair_sum(X, lambda g: g ** (2 * t))
    c = float(tensor_constant(X.dimension, t))
    s = gram - c
    if abs(s) <= _ROUNDING_FLOOR * max(gram, c):
        return 0.0
    return math.sqrt(max(s, 0.0))


def tensor_discrepancy_bruteforce(X: WeightedPointSet, t: int) -> float:
    """Same quantity as ``tensor_discrepancy``, from the explicit tensors (small d only)."""
    _check_sphere(X)
    d = X.dimension
    if d ** (2 * t) >= 10**6:
        raise TooLarge(f"d^(2t) = {d ** (2 * t)} entries, the limit is below 1e6")
    pts, w = X.float_points(), X.float_weights()
    cache: dict[tuple[int, ...], float] = {}
    parts = []
    for beta in itertools.product(range(d), repeat=2 * t):
        alpha = tuple(np.bincount(beta, minlength=d))
        if alpha not in cache:
            emp = math.fsum(w * np.prod(pts ** np.array(alpha)[None, :], axis=1))
            cache[alpha] = emp - float(sphere_moment(alpha, d))
        parts.append(cache[alpha] ** 2)
    return math.sqrt(math.fsum(parts))


def tensor_sample_size(epsilon: float, t: int = 1) -> int:
    return max(1, math.ceil(t / epsilon**2))


def construct_tensor_approx(d: int, t: int, epsilon: float, seed: int, max_retries: int = MAX_RETRIES) -> WeightedPointSet:
    """``ceil(eps^-2)`` uniform points with tensor discrepancy at most eps."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    k = tensor_sample_size(epsilon)
    return _sample_loop(k, d, seed, lambda Y: tensor_discrepancy(Y, t) <= epsilon, max_retries)


def tensor_lower_bound(d: int, t: int, epsilon: float) -> int:
    """Any set with tensor discrepancy <= eps has at least ``ceil(1/(eps^2 + c(d,t)))`` points."""
    if math.isinf(epsilon):
        return 1
    c = tensor_constant(d, t)
    return max(1, math.ceil(1 / (Fraction(epsilon) ** 2 + c)))


def multi_strength_certificates(X: WeightedPointSet, t: int) -> dict[int, float]:
    """Tensor discrepancy at every even strength ``2s``, ``1 <= s <= t``."""
    return {2 * s: tensor_discrepancy(X, s) for s in range(1, t + 1)}


def multi_strength_tensor_construct(d: int, t: int, epsilon: float, seed: int,
                                    max_retries: int = MAX_RETRIES) -> WeightedPointSet:
    """``ceil(t eps^-2)`` uniform points certified at every strength ``2s <= 2t``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    k = tensor_sample_size(epsilon, t)
    return _sample_loop(
        k, d, seed,
        lambda Y: all(v <= epsilon for v in multi_strength_certificates(Y, t).values()),
        max_retries,
    )
