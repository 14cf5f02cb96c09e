"""Gegenbauer polynomials ``Q_k^d`` (normalised so ``Q_k^d(1) = dim W_k``),
their linearization, and the dimension / linear-programming lower bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from threading import Lock

import numpy as np

from .kernel import DesignError


class DimensionTooSmall(DesignError):
    pass


class ConditionViolated(DesignError):
    pass


def _binom(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def pochhammer(x: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out *= x + i
    return out


# ---------------------------------------------------------------------------
# exact polynomials in the monomial basis (coefficient lists, low to high)


def poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def poly_add(a: list[Fraction], b: list[Fraction], scale: Fraction = Fraction(1)) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] += scale * y
    return out


def poly_eval(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _trim(a: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


class _Table:
    """Memoised C_k^lambda coefficient lists; filling is idempotent and locked."""

    def __init__(self):
        self._lock = Lock()
        self._data: dict[Fraction, list[list[Fraction]]] = {}

    def get(self, lam: Fraction, k: int) -> list[Fraction]:
        with self._lock:
            rows = self._data.setdefault(lam, [[Fraction(1)], [Fraction(0), 2 * lam]])
            x = [Fraction(0), Fraction(1)]
            while len(rows) <= k:
                n = len(rows)
                nxt = poly_add(
                    [c * 2 * (n + lam - 1) / n for c in poly_mul(x, rows[n - 1])],
                    rows[n - 2],
                    -Fraction(n + 2 * lam - 2, 1) / n,
                )
                rows.append(_trim(nxt))
            return list(rows[k])


_C_TABLE = _Table()


def gegenbauer_C(k: int, lam: Fraction) -> list[Fraction]:
    """Classical ``C_k^lambda`` via the three-term recurrence."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return _C_TABLE.get(Fraction(lam), k)


def q_scale(k: int, d: int) -> Fraction:
    return Fraction(d + 2 * k - 2, d - 2)


def gegenbauer_Q(k: int, d: int) -> list[Fraction]:
    """Exact monomial coefficients of ``Q_k^d = (d+2k-2)/(d-2) C_k^{(d-2)/2}``."""
    if d < 3:
        raise DimensionTooSmall("Q_k^d needs d >= 3")
    if k < 0:
        raise ValueError("k must be nonnegative")
    c = q_scale(k, d)
    return [c * v for v in gegenbauer_C(k, Fraction(d - 2, 2))]


def dim_W(d: int, k: int) -> int:
    """Dimension of the degree-k homogeneous harmonics on S^{d-1}."""
    return _binom(d + k - 1, d - 1) - _binom(d + k - 3, d - 1)


def dim_P_sphere(d: int, t: int) -> int:
    return _binom(d + t - 1, d - 1) + _binom(d + t - 2, d - 1)


def dim_P_gaussian(d: int, t: int) -> int:
    return _binom(d + t, t)


def delsarte_bound(d: int, t: int) -> int:
    """Minimum size of a spherical t-design in R^d."""
    e = t // 2
    if t % 2 == 0:
        return _binom(d + e - 1, d - 1) + _binom(d + e - 2, d - 1)
    return 2 * _binom(d + e - 1, d - 1)


def linearization_coeffs(m: int, n: int, lam) -> dict[int, Fraction]:
    """``a(k)`` with ``C_m C_n = sum_k a(k) C_{m+n-2k}`` (all with parameter lambda)."""
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if m < 0 or n < 0:
        raise ValueError("degrees must be nonnegative")
    out = {}
    for k in range(min(m, n) + 1):
        s = m + n - 2 * k
        num = (m + n + lam - 2 * k) * pochhammer(lam, k) * pochhammer(lam, m - k) \
            * pochhammer(lam, n - k) * pochhammer(2 * lam, m + n - k) * math.factorial(s)
        den = (m + n + lam - k) * math.factorial(k) * math.factorial(m - k) * math.factorial(n - k) \
            * pochhammer(lam, m + n - k) * pochhammer(2 * lam, s)
        out[k] = num / den
    return out


@dataclass(frozen=True)
class PolyQ:
    """``sum_k coeffs[k] * Q_k^d``."""

    d: int
    coeffs: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.d < 3:
            raise DimensionTooSmall("Q_k^d needs d >= 3")
        object.__setattr__(self, "coeffs", {int(k): Fraction(v) for k, v in self.coeffs.items() if v})

    def degree(self) -> int:
        return max(self.coeffs, default=0)

    def monomial(self) -> list[Fraction]:
        out = [Fraction(0)]
        for k, a in self.coeffs.items():
            out = poly_add(out, gegenbauer_Q(k, self.d), a)
        return _trim(out)

    def value_at_one(self) -> Fraction:
        return sum((a * dim_W(self.d, k) for k, a in self.coeffs.items()), Fraction(0))

    def __call__(self, x):
        mono = [float(c) for c in self.monomial()]
        return poly_eval(mono, np.asarray(x, dtype=float))

    @classmethod
    def from_monomial(cls, d: int, coeffs: list[Fraction]) -> "PolyQ":
        """Expand a monomial-basis polynomial in the Q basis (top-down elimination)."""
        rest = _trim([Fraction(c) for c in coeffs])
        out: dict[int, Fraction] = {}
        for k in range(len(rest) - 1, -1, -1):
            if k >= len(rest) or rest[k] == 0:
                continue
            qk = gegenbauer_Q(k, d)
            a = rest[k] / qk[k]
            out[k] = a
            rest = poly_add(rest, qk, -a)[:k] or [Fraction(0)]
        return cls(d, out)


def expand_Q_square(t: int, d: int) -> PolyQ:
    """Gegenbauer coefficients of ``(Q_t^d)^2``."""
    if d < 3:
        raise DimensionTooSmall("Q_k^d needs d >= 3")
    if t < 1:
        raise ValueError("t must be >= 1")
    lam = Fraction(d - 2, 2)
    ct = q_scale(t, d)
    coeffs = {}
    for k, a in linearization_coeffs(t, t, lam).items():
        j = 2 * t - 2 * k
        coeffs[j] = ct * ct * a / q_scale(j, d)
    return PolyQ(d, coeffs)


def chebyshev_grid(n: int = 10_000) -> np.ndarray:
    return np.cos(np.pi * np.arange(n) / (n - 1))


def lp_bound(g: PolyQ, epsilon: float, t: int, exact: bool = False):
    """Lower bound ``g(1) / (alpha_0 + eps^2 max_{1<=k<=t} alpha_k)`` on the size
    of an epsilon-approximate spherical t-design.

    Requires ``alpha_k <= 0`` for ``k > t`` (checked exactly) and ``g >= 0`` on
    [-1, 1] (checked on a Chebyshev grid with 1e-12 slack).
    """
    for k, a in sorted(g.coeffs.items()):
        if k > t and a > 0:
            raise ConditionViolated(f"coefficient alpha_{k} = {a} > 0 beyond degree {t}")
    xs = chebyshev_grid()
    vals = g(xs)
    worst = int(np.argmin(vals))
    if vals[worst] < -1e-12:
        raise ConditionViolated(f"g({xs[worst]:.6g}) = {vals[worst]:.3g} < 0")
    eps2 = Fraction(epsilon) ** 2
    alpha0 = g.coeffs.get(0, Fraction(0))
    alpha = max((g.coeffs.get(k, Fraction(0)) for k in range(1, t + 1)), default=Fraction(0))
    denom = alpha0 + eps2 * alpha
    if denom <= 0:
        raise ConditionViolated("alpha_0 + eps^2 alpha must be positive")
    value = g.value_at_one() / denom
    return value if exact else float(value)


def approx_lower_bound(d: int, t: int, epsilon: float, exact: bool = False):
    """LP lower bound for epsilon-approximate spherical 2t-designs using ``g = Q_t^2``."""
    return lp_bound(expand_Q_square(t, d), epsilon, 2 * t, exact=exact)


@lru_cache(maxsize=None)
def q_sum_coeffs(t: int, d: int) -> tuple[float, ...]:
    """Monomial coefficients (float) of ``Q_1 + ... + Q_t``."""
    acc = [Fraction(0)]
    for k in range(1, t + 1):
        acc = poly_add(acc, gegenbauer_Q(k, d))
    return tuple(float(c) for c in acc)
