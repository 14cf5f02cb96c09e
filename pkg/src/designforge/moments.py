"""Exact monomial moments of the uniform sphere measure, the Gaussian
``exp(-pi |x|^2) dx`` and the radial law of a Gaussian vector's norm."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .kernel import PiValue, enumerate_multi_indices


def double_factorial(n: int) -> int:
    """``n!!`` with the convention ``(-1)!! = 0!! = 1``."""
    if n < -1:
        raise ValueError("double factorial undefined below -1")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def sphere_moment(alpha: Sequence[int], d: int) -> Fraction:
    """Average of ``x**alpha`` over the unit sphere in R^d."""
    if d < 1 or len(alpha) != d:
        raise ValueError("alpha must have length d >= 1")
    if any(a % 2 for a in alpha):
        return Fraction(0)
    k = sum(alpha)
    num = 1
    for a in alpha:
        num *= double_factorial(a - 1)
    den = 1
    for j in range(0, k, 2):
        den *= d + j
    return Fraction(num, den)


def gaussian_moment(alpha: Sequence[int]) -> PiValue:
    """``int x**alpha exp(-pi |x|^2) dx`` as ``c * pi**(-|alpha|/2)``."""
    if any(a % 2 for a in alpha):
        return PiValue(Fraction(0))
    k = sum(alpha)
    num = 1
    for a in alpha:
        num *= double_factorial(a - 1)
    return PiValue(Fraction(num, 2 ** (k // 2)), -k)


def _half_gamma_ratio(top2: int, bottom2: int) -> PiValue:
    """``Gamma(top2/2) / Gamma(bottom2/2)`` via ``Gamma(x+1) = x Gamma(x)``.

    Arguments are doubled so half-integers stay integral. The result is a
    rational times ``pi**(+-1/2)`` when exactly one argument is a half-integer.
    """
    if top2 < 1 or bottom2 < 1:
        raise ValueError("Gamma arguments must be positive")
    value = Fraction(1)
    # reduce both to their base 1/2 or 1
    t = top2
    while t > 2:
        t -= 2
        value *= Fraction(t, 2)
    b = bottom2
    while b > 2:
        b -= 2
        value /= Fraction(b, 2)
    # Gamma(1/2) = sqrt(pi), Gamma(1) = 1
    e = (1 if t == 1 else 0) - (1 if b == 1 else 0)
    return PiValue(value, e)


def radial_moment(k: int, d: int) -> PiValue:
    """``k``-th moment of ``|x|`` for ``x ~ exp(-pi |x|^2) dx`` in R^d,
    ``Gamma((k+d)/2) / (Gamma(d/2) pi**(k/2))``."""
    if k < 0 or d < 1:
        raise ValueError("need k >= 0 and d >= 1")
    ratio = _half_gamma_ratio(k + d, d)
    return PiValue(ratio.coeff, ratio.e - k)


def sphere_area_factor(d: int) -> PiValue:
    """Surface area of S^{d-1}, ``2 pi**(d/2) / Gamma(d/2)``."""
    g = _half_gamma_ratio(2, d)  # 1 / Gamma(d/2)
    return PiValue(2 * g.coeff, g.e + d)


@lru_cache(maxsize=None)
def moment_table(measure: str, d: int, max_deg: int) -> dict[tuple[int, ...], object]:
    """Exact moments for every ``|alpha| <= max_deg``; sphere entries are
    ``Fraction``, Gaussian entries ``PiValue``."""
    if measure == "sphere":
        return {a: sphere_moment(a, d) for a in enumerate_multi_indices(d, max_deg)}
    if measure == "gaussian":
        return {a: gaussian_moment(a) for a in enumerate_multi_indices(d, max_deg)}
    raise ValueError(f"unknown measure {measure!r}")


def moment(alpha: Sequence[int], measure: str, d: int):
    if measure == "sphere":
        return sphere_moment(alpha, d)
    if measure == "gaussian":
        return gaussian_moment(alpha)
    raise ValueError(f"unknown measure {measure!r}")


def moment_float(alpha: Sequence[int], measure: str, d: int) -> float:
    return float(moment(alpha, measure, d))
