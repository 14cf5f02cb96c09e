"""Moment-residual verification of weighted point sets, exact or in binary64."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .kernel import DesignError, PiPoly, PiValue, WeightedPointSet, enumerate_multi_indices
from .moments import moment

DEFAULT_TOL = 1e-9


class ExactUnsupported(DesignError):
    pass


@dataclass(frozen=True)
class VerificationReport:
    strength_tested: int
    per_degree_max_residual: tuple[float, ...]
    worst_monomial: tuple[int, ...]
    worst_residual: object
    mode: str
    passed: bool
    tolerance: float

    def max_residual(self) -> float:
        return max(self.per_degree_max_residual, default=0.0)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [
            f"result: {status}",
            f"mode: {self.mode}",
            f"strength: {self.strength_tested}",
            f"tolerance: {self.tolerance if self.mode == 'float' else 0}",
            f"worst_monomial: {','.join(map(str, self.worst_monomial))}",
            f"worst_residual: {self.worst_residual}",
        ]
        for k, r in enumerate(self.per_degree_max_residual):
            lines.append(f"degree {k}: {r:.3e}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# monomial sums


class _FloatSums:
    def __init__(self, X: WeightedPointSet, max_deg: int):
        pts = X.float_points()
        self.w = X.float_weights()
        self.powers = [[np.ones(len(X))] for _ in range(X.dimension)]
        for i in range(X.dimension):
            col = pts[:, i]
            for _ in range(max_deg):
                self.powers[i].append(self.powers[i][-1] * col)

    def __call__(self, alpha) -> float:
        prod = self.w
        for i, a in enumerate(alpha):
            if a:
                prod = prod * self.powers[i][a]
        return math.fsum(prod)


class _ExactSums:
    """Exact ``sum_x w(x) x^alpha``. Points sharing a weight are summed as
    scaled integers first, so the per-point work stays in machine integers
    whenever the magnitudes allow."""

    def __init__(self, X: WeightedPointSet, max_deg: int):
        pts = X.points
        den = 1
        for v in pts.flat:
            den = math.lcm(den, v.denominator)
        self.den = den
        ints = [[int(v * den) for v in row] for row in pts]
        biggest = max((abs(v) for row in ints for v in row), default=0)
        fits = biggest == 0 or (max_deg * math.log2(max(biggest, 1)) + math.log2(len(X) + 1) < 62)
        dtype = np.int64 if fits else object
        groups: dict = {}
        for idx, w in enumerate(X.weights):
            groups.setdefault(w, []).append(idx)
        self.groups = []
        for w, idxs in groups.items():
            block = np.array([ints[i] for i in idxs], dtype=dtype)
            powers = []
            for i in range(X.dimension):
                col = block[:, i]
                pw = [np.ones(len(idxs), dtype=dtype)]
                for _ in range(max_deg):
                    pw.append(pw[-1] * col)
                powers.append(pw)
            self.groups.append((w, powers, len(idxs)))

    def __call__(self, alpha):
        total = Fraction(0)
        scale = Fraction(1, self.den ** sum(alpha))
        for w, powers, n in self.groups:
            prod = None
            for i, a in enumerate(alpha):
                if a:
                    prod = powers[i][a] if prod is None else prod * powers[i][a]
            s = n if prod is None else int(prod.sum())
            if s:
                total = total + w * (s * scale)
        return total


def monomial_sums(X: WeightedPointSet, max_deg: int, exact: bool):
    if exact:
        if not X.exact:
            raise ExactUnsupported("exact verification needs rational coordinates and exact weights")
        return _ExactSums(X, max_deg)
    return _FloatSums(X, max_deg)


def _exact_target(alpha, measure: str, d: int):
    m = moment(alpha, measure, d)
    if isinstance(m, PiValue):
        return m.to_pipoly() if m.coeff else Fraction(0)
    return m


def _is_zero(v) -> bool:
    if isinstance(v, PiPoly):
        return v.is_zero()
    return v == 0


def _magnitude(v) -> float:
    return abs(float(v))


# ---------------------------------------------------------------------------


def verify_design(X: WeightedPointSet, t: int, mode: str = "float", tolerance: float = DEFAULT_TOL) -> VerificationReport:
    """Compare ``sum_x w(x) x^alpha`` with the measure's moment for every ``|alpha| <= t``."""
    if t < 0:
        raise ValueError("strength must be nonnegative")
    if mode not in ("exact", "float"):
        raise ValueError(f"unknown mode {mode!r}")
    exact = mode == "exact"
    sums = monomial_sums(X, t, exact)
    d = X.dimension
    per_degree = [0.0] * (t + 1)
    worst_alpha = (0,) * d
    worst_mag = -1.0
    worst_val: object = 0.0
    ok = True
    for alpha in enumerate_multi_indices(d, t):
        got = sums(alpha)
        if exact:
            target = _exact_target(alpha, X.measure, d)
            resid = got - target
            mag = _magnitude(resid)
            bad = not _is_zero(resid)
        else:
            target = float(moment(alpha, X.measure, d))
            resid = abs(got - target)
            mag = resid
            bad = mag > tolerance
        ok = ok and not bad
        k = sum(alpha)
        per_degree[k] = max(per_degree[k], mag)
        # ties go to the later (lexicographically larger) monomial, e.g. x1^4 over x3^4
        if mag >= worst_mag:
            worst_mag, worst_alpha, worst_val = mag, alpha, resid
    if exact and isinstance(worst_val, Fraction):
        worst_val = abs(worst_val)
    return VerificationReport(t, tuple(per_degree), worst_alpha, worst_val, mode, ok, tolerance)


@dataclass(frozen=True)
class OddVanishingReport:
    passed: bool
    degree_cap: int
    checked: int
    worst_monomial: tuple[int, ...] | None
    worst_residual: object


def odd_multi_indices(d: int, cap: int) -> Iterable[tuple[int, ...]]:
    for alpha in enumerate_multi_indices(d, cap):
        if any(a % 2 for a in alpha):
            yield alpha


def verify_odd_vanishing(X: WeightedPointSet, degree_cap: int, tolerance: float = DEFAULT_TOL) -> OddVanishingReport:
    """Every monomial with an odd exponent and degree <= cap must average to 0.

    Exact sets must give identically zero sums; float sets must stay within
    ``tolerance``.
    """
    sums = monomial_sums(X, degree_cap, X.exact)
    worst, worst_mag, worst_val, n = None, -1.0, 0, 0
    ok = True
    for alpha in odd_multi_indices(X.dimension, degree_cap):
        n += 1
        v = sums(alpha)
        mag = _magnitude(v)
        bad = (not _is_zero(v)) if X.exact else mag > tolerance
        if bad:
            ok = False
        if mag > worst_mag:
            worst, worst_mag, worst_val = alpha, mag, v
    if ok and worst_mag <= 0:
        worst = None
    return OddVanishingReport(ok, degree_cap, n, worst, worst_val)
