"""One-dimensional moment matching.

Gauss rules are built from raw moments: Cholesky of the Hankel matrix gives
the three-term recurrence, and the Jacobi matrix eigenpairs give nodes and
weights (Golub-Welsch). The arithmetic runs in mpmath at ``_DPS`` digits so
moderately ill-conditioned Hankel matrices (n <= 12) still come out clean.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np
from scipy.optimize import least_squares

from .kernel import DesignError
from .moments import gaussian_moment, radial_moment

_DPS = 60
MAX_RESTARTS = 200


class HankelNotPD(DesignError):
    pass


class NoSolution(DesignError):
    pass


@dataclass(frozen=True)
class Quadrature:
    nodes: tuple[float, ...]
    weights: tuple[float, ...]
    matched_degree: int

    def __len__(self):
        return len(self.nodes)

    def moment(self, k: int) -> float:
        return math.fsum(w * x**k for x, w in zip(self.nodes, self.weights))


def _jacobi_matrix(moments: Sequence, n: int):
    """Recurrence coefficients (a_0..a_{n-1}, b_1..b_{n-1}) from moments m_0..m_{2n}."""
    H = mpmath.matrix(n + 1, n + 1)
    for i in range(n + 1):
        for j in range(n + 1):
            H[i, j] = moments[i + j]
    # upper-triangular R with R^T R = H
    R = mpmath.matrix(n + 1, n + 1)
    for i in range(n + 1):
        s = H[i, i] - mpmath.fsum(R[k, i] ** 2 for k in range(i))
        if i < n and s <= mpmath.mpf(10) ** (-_DPS + 10) * abs(H[i, i]):
            raise HankelNotPD(f"Hankel matrix of order {i + 1} is not positive definite")
        if i == n:
            break
        R[i, i] = mpmath.sqrt(s)
        for j in range(i + 1, n + 1):
            R[i, j] = (H[i, j] - mpmath.fsum(R[k, i] * R[k, j] for k in range(i))) / R[i, i]
    a, b = [], []
    for j in range(n):
        aj = R[j, j + 1] / R[j, j]
        if j > 0:
            aj -= R[j - 1, j] / R[j - 1, j - 1]
        a.append(aj)
    for j in range(1, n):
        b.append(R[j, j] / R[j - 1, j - 1])
    return a, b


def gauss_quadrature(moments: Sequence, n: int) -> Quadrature:
    """n-point Gauss rule for the measure with the given raw moments.

    Needs ``moments[0..2n-1]``; ``moments[2n]`` is not required. Nodes and
    weights are exact to the precision of the inputs and the rule matches
    moments up to degree ``2n - 1``.
    """
    if n < 1:
        raise ValueError("need at least one node")
    if len(moments) < 2 * n:
        raise ValueError(f"need {2 * n} moments for an {n}-point rule")
    with mpmath.workdps(_DPS):
        m = [mpmath.mpf(x) if not isinstance(x, mpmath.mpf) else x for x in moments[: 2 * n]]
        if abs(m[0] - 1) > mpmath.mpf("1e-12"):
            raise ValueError("moments[0] must be 1")
        # pad so the Cholesky helper can address index 2n; the last row is unused
        a, b = _jacobi_matrix(m + [mpmath.mpf(0)], n)
        J = mpmath.matrix(n, n)
        for i in range(n):
            J[i, i] = a[i]
        for i in range(n - 1):
            J[i, i + 1] = J[i + 1, i] = b[i]
        evals, evecs = mpmath.eigsy(J)
        pairs = sorted((evals[i], m[0] * evecs[0, i] ** 2) for i in range(n))
        nodes = tuple(float(x) for x, _ in pairs)
        weights = tuple(float(w) for _, w in pairs)
    if any(w <= 0 for w in weights):
        raise HankelNotPD("Gauss weights came out nonpositive")
    return Quadrature(nodes, weights, 2 * n - 1)


def gaussian_1d_moments(count: int) -> list:
    """Moments 0..count-1 of ``exp(-pi x^2) dx`` on R, as mpmath numbers."""
    with mpmath.workdps(_DPS):
        out = []
        for k in range(count):
            v = gaussian_moment((k,))
            out.append(mpmath.mpf(v.coeff.numerator) / v.coeff.denominator * mpmath.pi ** (mpmath.mpf(v.e) / 2))
        return out


def radial_moments(d: int, count: int) -> list:
    with mpmath.workdps(_DPS):
        out = []
        for k in range(count):
            v = radial_moment(k, d)
            out.append(mpmath.mpf(v.coeff.numerator) / v.coeff.denominator * mpmath.pi ** (mpmath.mpf(v.e) / 2))
        return out


def radial_design(d: int, t: int) -> Quadrature:
    """Gauss rule for the law of ``|x|``, matching radial moments 0..t."""
    if d < 1 or t < 0:
        raise ValueError("need d >= 1 and t >= 0")
    n = (t + 2) // 2
    return gauss_quadrature(radial_moments(d, 2 * n), n)


# ---------------------------------------------------------------------------
# unweighted 1-D Gaussian designs


def _assemble(pairs: np.ndarray, zeros: int) -> list[float]:
    pts = [float(abs(a)) for a in pairs]
    return sorted([-a for a in pts] + [0.0] * zeros + pts)


def _moment_residuals(points: Sequence[float], t: int) -> list[float]:
    q = len(points)
    out = []
    for k in range(1, t + 1):
        target = float(gaussian_moment((k,)))
        got = math.fsum(x**k for x in points) / q
        out.append((got - target) / max(1.0, abs(target)))
    return out


def unweighted_1d_gaussian_design(t: int, q: int, seed: int) -> list[float]:
    """q reals whose uniform distribution shares the first ``t`` moments of
    ``exp(-pi x^2) dx``.

    Searches negation-symmetric multisets (pairs +-a plus zeros) by
    least squares on the even-moment residuals, over seeded restarts.
    Raises ``NoSolution`` when the restart budget runs out; that is a search
    failure, not a proof that no design exists.
    """
    if t < 0 or q < 1:
        raise ValueError("need t >= 0 and q >= 1")
    if t <= 1:
        return [0.0] * q
    even_ks = list(range(2, t + 1, 2))
    targets = np.array([float(gaussian_moment((k,))) for k in even_ks])
    rng = np.random.default_rng(seed)
    scale = 1.0 / math.sqrt(2 * math.pi)
    zero_options = [z for z in range(q % 2, q + 1, 2) if (q - z) // 2 >= 1]
    if not zero_options:
        raise NoSolution(f"no symmetric {q}-point set has nonzero variance")
    for restart in range(MAX_RESTARTS):
        z = zero_options[restart % len(zero_options)]
        m = (q - z) // 2
        x0 = np.abs(rng.normal(scale=2 * scale, size=m)) + 1e-3

        def resid(a, m=m):
            sq = a * a
            return np.array([2.0 * np.sum(sq ** (k // 2)) / q for k in even_ks]) / targets - 1.0

        sol = least_squares(resid, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
        pts = _assemble(sol.x, z)
        if max(abs(r) for r in _moment_residuals(pts, t)) <= 1e-11:
            return pts
    raise NoSolution(f"search failed for t={t}, q={q} after {MAX_RESTARTS} restarts")
