"""Concrete design constructions.

* the cross-polytope ``{+-e_i}``;
* weighted designs fitted on a candidate pool, then shrunk to a minimal
  support by Caratheodory pruning;
* unweighted Gaussian designs as products of a 1-D design over a t-wise
  independent symbol array;
* signed designs glued from coordinate-symmetric orbits ``Y_t(a)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import nnls

from . import _linalg
from .ffield import SymbolArray, twise_construct
from .gegenbauer import dim_P_gaussian, dim_P_sphere
from .kernel import (
    DesignError,
    ParseError,
    PiPoly,
    WeightedPointSet,
    enumerate_multi_indices,
    infer_kind,
    uniform_weights,
)
from .moments import gaussian_moment, moment, sphere_moment
from .quad1d import unweighted_1d_gaussian_design
from .verify import DEFAULT_TOL, VerificationReport, verify_design

SINGULAR_RETRIES = 100


class FitFailed(DesignError):
    pass


class PruneStall(DesignError):
    def __init__(self, message: str, best: WeightedPointSet | None = None):
        super().__init__(message)
        self.best = best


class TooManyParts(DesignError):
    pass


class SingularAfterRetries(DesignError):
    pass


# ---------------------------------------------------------------------------
# cross-polytope


def cross_polytope(d: int) -> WeightedPointSet:
    """The 2d points ``+-e_i`` with weight ``1/(2d)``, in exact rationals."""
    if d < 1:
        raise ValueError("d must be >= 1")
    pts = []
    for i in range(d):
        for s in (1, -1):
            row = [Fraction(0)] * d
            row[i] = Fraction(s)
            pts.append(row)
    return WeightedPointSet(np.array(pts, dtype=object), uniform_weights(2 * d, True), "sphere", "unweighted", 3)


# ---------------------------------------------------------------------------
# pool fitting and Caratheodory pruning


def design_dimension(measure: str, d: int, s: int) -> int:
    return dim_P_sphere(d, s) if measure == "sphere" else dim_P_gaussian(d, s)


def _moment_matrix(points, alphas, exact: bool):
    if exact:
        return [[math.prod((x**a for x, a in zip(p, alpha)), start=Fraction(1)) for p in points]
                for alpha in alphas]
    pts = np.asarray(points, dtype=float)
    A = np.empty((len(alphas), len(pts)))
    for r, alpha in enumerate(alphas):
        A[r] = np.prod(pts ** np.array(alpha)[None, :], axis=1)
    return A


def fit_weights_on_pool(pool, measure: str, s: int) -> WeightedPointSet:
    """Nonnegative weights on ``pool`` matching every moment of degree <= s.

    Solved as nonnegative least squares; the fit must reproduce the moments
    to 1e-9 or ``FitFailed`` is raised. Zero-weight pool points are dropped.
    """
    pts = np.asarray(pool, dtype=float)
    if pts.ndim != 2:
        raise ValueError("pool must be an (N, d) array")
    d = pts.shape[1]
    alphas = enumerate_multi_indices(d, s)
    if len(pts) < 1:
        raise FitFailed("empty pool")
    A = _moment_matrix(pts, alphas, exact=False)
    b = np.array([float(moment(a, measure, d)) for a in alphas])
    w, _ = nnls(A, b, maxiter=50 * A.shape[1])
    keep = w > 1e-14 * max(w.max(), 1e-300)
    if not keep.any():
        raise FitFailed("pool admits no nonnegative moment fit")
    w = np.where(keep, w, 0.0)
    resid = np.max(np.abs(A @ w - b))
    if resid > 1e-9:
        raise FitFailed(f"pool too degenerate: moment residual {resid:.2e}")
    w = w[keep]
    w = w / math.fsum(w)
    return WeightedPointSet(pts[keep], w, measure, "weighted", s)


def _numerical_null_vector(A: np.ndarray) -> np.ndarray | None:
    n = A.shape[1]
    _, sv, vt = np.linalg.svd(A, full_matrices=True)
    tol = 1e-10 * (sv[0] if sv.size else 1.0)
    r = int(np.sum(sv > tol))
    if r >= n:
        return None
    return vt[-1]


def caratheodory_prune(X: WeightedPointSet, s: int, tolerance: float = DEFAULT_TOL) -> WeightedPointSet:
    """Shrink the support of a nonnegative design while keeping every moment of degree <= s.

    Each step finds a null direction ``v`` of the moment matrix on the current
    support and moves the weights along ``-v`` until one of them hits zero.
    Exact sets are pruned in exact arithmetic.
    """
    if X.kind == "signed":
        raise ValueError("pruning needs nonnegative weights")
    d = X.dimension
    alphas = enumerate_multi_indices(d, s)
    if X.exact:
        return _prune_exact(X, s, alphas)
    report = verify_design(X, s, "float", tolerance)
    if not report.passed:
        raise ValueError(f"input is not a strength-{s} design (residual {report.max_residual():.2e})")
    pts = X.points
    w = X.weights.astype(float).copy()
    A_full = _moment_matrix(pts, alphas, exact=False)
    support = list(range(len(X)))
    while True:
        A = A_full[:, support]
        v = _numerical_null_vector(A)
        if v is None:
            break
        if v.max() <= 0:
            v = -v
        ws = w[support]
        pos = v > 1e-14 * np.abs(v).max()
        ratios = np.full(len(support), np.inf)
        ratios[pos] = ws[pos] / v[pos]
        j = int(np.argmin(ratios))
        theta = ratios[j]
        ws = ws - theta * v
        ws[j] = 0.0
        ws[ws < 0] = 0.0
        w[support] = ws
        support = [i for i, val in zip(support, ws) if val > 0]
        if not support:
            raise PruneStall("all weights vanished")
    w_out = w[support]
    w_out = w_out / math.fsum(w_out)
    out = WeightedPointSet(pts[support], w_out, X.measure, "weighted", s)
    report = verify_design(out, s, "float", tolerance)
    if not report.passed:
        raise PruneStall(f"moment drift {report.max_residual():.2e} after pruning", best=out)
    return out


def _prune_exact(X: WeightedPointSet, s: int, alphas) -> WeightedPointSet:
    report = verify_design(X, s, "exact")
    if not report.passed:
        raise ValueError(f"input is not an exact strength-{s} design")
    pts = [tuple(row) for row in X.points]
    w = [Fraction(v) for v in X.weights]
    A_full = _moment_matrix(pts, alphas, exact=True)
    support = list(range(len(pts)))
    while True:
        A = [[row[i] for i in support] for row in A_full]
        v = _linalg.kernel_vector(A)
        if v is None:
            break
        if max(v) <= 0:
            v = [-x for x in v]
        ratios = [(w[i] / vi, k) for k, (i, vi) in enumerate(zip(support, v)) if vi > 0]
        theta, _ = min(ratios)
        for i, vi in zip(support, v):
            w[i] -= theta * vi
        support = [i for i in support if w[i] > 0]
    out = WeightedPointSet(
        np.array([pts[i] for i in support], dtype=object),
        np.array([w[i] for i in support], dtype=object),
        X.measure, "weighted", s,
    )
    return out


# ---------------------------------------------------------------------------
# unweighted Gaussian product designs


def gaussian_product_design(d: int, t: int, q: int, seed: int, with_array: bool = False):
    """Unweighted Gaussian t-design: a 1-D unweighted design of size q placed on
    the symbols of a t-wise independent array in ``{0..q-1}^d``."""
    values = sorted(unweighted_1d_gaussian_design(t, q, seed))
    if t < 2:
        # any array is 1-wise independent if each column is uniform; use all symbols
        rows = np.array([[i] * d for i in range(q)], dtype=np.int64)
        array = SymbolArray(q, rows)
    else:
        array = twise_construct(q, d, t, seed)
    pts = np.asarray(values, dtype=float)[array.rows]
    design = WeightedPointSet(pts, uniform_weights(len(pts), False), "gaussian", "unweighted", t)
    return (design, array) if with_array else design


# ---------------------------------------------------------------------------
# partitions, orbits and signed designs


def _partitions_of(n: int, max_part: int, max_len: int):
    """Partitions of n (parts <= max_part, at most max_len parts), lexicographically descending."""
    if n == 0:
        yield ()
        return
    if max_len == 0:
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in _partitions_of(n - first, first, max_len - 1):
            yield (first,) + rest


def partitions_up_to(t: int, d: int | None = None) -> list[tuple[int, ...]]:
    """Partitions of 0..t into at most d parts, graded then lexicographically descending."""
    if t < 0:
        raise ValueError("t must be >= 0")
    max_len = t if d is None else d
    out = []
    for n in range(t + 1):
        out.extend(_partitions_of(n, n, max_len))
    return out


def partitions_of(t: int, d: int | None = None) -> list[tuple[int, ...]]:
    return list(_partitions_of(t, t, t if d is None else d))


def partition_count(t: int, d: int | None = None) -> int:
    return len(partitions_up_to(t, d))


def orbit_size(t: int, d: int) -> int:
    if t > d:
        raise TooManyParts(f"need t <= d, got t={t}, d={d}")
    return 2**t * math.perm(d, t)


def orbit_points(a: Sequence, d: int) -> list[tuple]:
    """The multiset ``Y_t(a)``: every signed placement of ``a_1..a_t`` on distinct coordinates."""
    t = len(a)
    orbit_size(t, d)
    zero = a[0] * 0 if t else 0
    out = []
    for sigma in itertools.permutations(range(d), t):
        for signs in itertools.product((1, -1), repeat=t):
            p = [zero] * d
            for i, (c, s) in enumerate(zip(sigma, signs)):
                p[c] = s * a[i]
            out.append(tuple(p))
    return out


def orbit_moment(alpha: Sequence[int], a: Sequence):
    """``sum_{y in Y_t(a)} y^alpha`` by counting placements, without materializing the orbit.

    Zero when any exponent is odd. Otherwise, with ``beta`` the nonzero
    exponents (m of them): ``2^t (d-m)!/(d-t)! sum_tau prod_j a_{tau(j)}^{beta_j}``
    over injections ``tau`` of the m support coordinates into the generator slots.
    """
    d, t = len(alpha), len(a)
    orbit_size(t, d)
    if any(x % 2 for x in alpha):
        return 0 * (a[0] if t else 1)
    beta = [x for x in alpha if x]
    m = len(beta)
    if m > t:
        return 0 * (a[0] if t else 1)
    total = 0
    for tau in itertools.permutations(range(t), m):
        term = 1
        for j, slot in enumerate(tau):
            term = term * a[slot] ** beta[j]
        total = total + term
    return 2**t * math.perm(d - m, t - m) * total


def _random_rational(rng, lo=Fraction(1, 2), hi=Fraction(2)) -> Fraction:
    den = int(rng.integers(2, 9))
    num = int(rng.integers(math.ceil(lo * den), math.floor(hi * den) + 1))
    return Fraction(num, den)


def _random_unit_rational(rng, t: int) -> tuple[Fraction, ...]:
    """Rational point on S^{t-1} with positive entries (inverse stereographic projection)."""
    if t == 1:
        return (Fraction(1),)
    while True:
        u = [_random_rational(rng, Fraction(1, 4), Fraction(3, 2)) for _ in range(t - 1)]
        n2 = sum(x * x for x in u)
        x = [2 * ui / (n2 + 1) for ui in u] + [(n2 - 1) / (n2 + 1)]
        x = tuple(abs(v) for v in x)
        if all(v != 0 for v in x):
            return x


@dataclass(frozen=True)
class OrbitDesign:
    """Signed design given as weighted orbits: every point of ``Y_t(a)`` gets weight ``w(a)``."""

    d: int
    t: int
    measure: str
    generators: tuple[tuple[Fraction, ...], ...]
    weights: tuple

    @property
    def strength(self) -> int:
        return 2 * self.t

    def size(self) -> int:
        return len(self.generators) * orbit_size(self.t, self.d)

    def moment_sum(self, alpha):
        total = Fraction(0)
        for a, w in zip(self.generators, self.weights):
            b = orbit_moment(alpha, a)
            if b:
                total = total + w * b
        return total

    def materialize(self) -> WeightedPointSet:
        pts, ws = [], []
        for a, w in zip(self.generators, self.weights):
            for p in orbit_points(a, self.d):
                pts.append(p)
                ws.append(w)
        kind = infer_kind(ws)
        return WeightedPointSet(np.array(pts, dtype=object), np.array(ws, dtype=object),
                                self.measure, kind, self.strength)


def _pi_target(two_alpha, measure: str, d: int):
    if measure == "gaussian":
        return gaussian_moment(two_alpha).to_pipoly()
    return sphere_moment(two_alpha, d)


def signed_design(d: int, t: int, measure: str, seed: int,
                  moment_fn: Callable[[tuple[int, ...]], object] | None = None) -> OrbitDesign:
    """Signed design of strength ``2t`` as a weighted union of orbits.

    Gaussian (and custom coordinate-symmetric) targets use one generator per
    partition of 0..t, each generator a random rational vector with entries in
    [1/2, 2]; weights come out as polynomials in 1/pi. On the sphere the
    generators are random rational unit vectors and only partitions of exactly
    t are matched: the remaining even moments follow from ``|x| = 1``.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if t > d:
        raise TooManyParts(f"need t <= d, got t={t}, d={d}")
    if measure not in ("sphere", "gaussian", "custom"):
        raise ValueError(f"unknown measure {measure!r}")
    if measure == "custom" and moment_fn is None:
        raise ValueError("custom measure needs moment_fn")
    if measure == "sphere":
        parts = partitions_of(t, d)
    else:
        parts = partitions_up_to(t, d)
    two_alphas = [tuple([2 * p for p in part] + [0] * (d - len(part))) for part in parts]
    if measure == "custom":
        rhs = [moment_fn(ta) for ta in two_alphas]
    else:
        rhs = [_pi_target(ta, measure, d) for ta in two_alphas]
    rng = np.random.default_rng(seed)
    for _ in range(SINGULAR_RETRIES):
        if measure == "sphere":
            gens = [_random_unit_rational(rng, t) for _ in parts]
        else:
            gens = [tuple(_random_rational(rng) for _ in range(t)) for _ in parts]
        B = [[orbit_moment(ta, a) for a in gens] for ta in two_alphas]
        w = _linalg.solve_square(B, rhs)
        if w is not None:
            return OrbitDesign(d, t, measure, tuple(gens), tuple(w))
    raise SingularAfterRetries(f"orbit moment matrix stayed singular after {SINGULAR_RETRIES} draws")


def _orbit_target(alpha, design: OrbitDesign):
    if design.measure == "gaussian":
        m = gaussian_moment(alpha)
        return m.to_pipoly() if m.coeff else Fraction(0)
    return sphere_moment(alpha, design.d)


def verify_orbit_design(design: OrbitDesign, strength: int | None = None) -> VerificationReport:
    """Exact residuals of every monomial of degree <= strength, from orbit moments."""
    t = design.strength if strength is None else strength
    per_degree = [0.0] * (t + 1)
    worst, worst_mag, worst_val, ok = (0,) * design.d, -1.0, Fraction(0), True
    for alpha in enumerate_multi_indices(design.d, t):
        resid = design.moment_sum(alpha) - _orbit_target(alpha, design)
        zero = resid.is_zero() if isinstance(resid, PiPoly) else resid == 0
        mag = abs(float(resid))
        ok = ok and zero
        per_degree[sum(alpha)] = max(per_degree[sum(alpha)], mag)
        if mag >= worst_mag:
            worst, worst_mag, worst_val = alpha, mag, resid
    return VerificationReport(t, tuple(per_degree), worst, worst_val, "exact", ok, 0.0)


def orbit_odd_vanishing(design: OrbitDesign, degree_cap: int) -> bool:
    """Every odd-exponent monomial up to ``degree_cap`` sums to exactly zero over the orbits."""
    for alpha in enumerate_multi_indices(design.d, degree_cap):
        if any(x % 2 for x in alpha):
            v = design.moment_sum(alpha)
            if (v.is_zero() if isinstance(v, PiPoly) else v == 0) is False:
                return False
    return True


# ---------------------------------------------------------------------------
# reflection families


@dataclass(frozen=True)
class ReflectionResult:
    passed: bool
    indices: tuple[int, ...] = ()
    expectation: object = 0


def reflection_family_check(E: Sequence[Sequence[int]], probabilities: Sequence, t: int) -> ReflectionResult:
    """Check ``E_j[eps_j(i_1) ... eps_j(i_r)] = 0`` for all distinct index tuples, ``1 <= r <= 2t``."""
    if not E:
        raise ValueError("need at least one sign vector")
    probs = list(probabilities)
    exact = all(isinstance(p, (int, Fraction)) for p in probs)
    total = sum(probs, Fraction(0)) if exact else math.fsum(probs)
    if (total != 1) if exact else abs(total - 1) > 1e-12:
        raise ValueError("probabilities must sum to 1")
    M = np.array(E, dtype=np.int64)
    d = M.shape[1]
    for r in range(1, min(2 * t, d) + 1):
        for idx in itertools.combinations(range(d), r):
            signs = np.prod(M[:, idx], axis=1)
            if exact:
                e = sum((p * int(s) for p, s in zip(probs, signs)), Fraction(0))
                bad = e != 0
            else:
                e = math.fsum(p * float(s) for p, s in zip(probs, signs))
                bad = abs(e) > 1e-12
            if bad:
                return ReflectionResult(False, idx, e)
    return ReflectionResult(True)


def reflection_lower_bound(d: int, t: int) -> int:
    """Minimum number of sign vectors in a mean-zero family of order 2t."""
    return math.comb(d, t)


# ---------------------------------------------------------------------------
# orbit design files


def format_orbit_design(design: OrbitDesign) -> str:
    out = ["orbit v1", f"measure: {design.measure}", f"dimension: {design.d}",
           f"strength: {design.strength}", f"generators: {len(design.generators)}"]
    for a, w in zip(design.generators, design.weights):
        coords = " ".join(f"{v.numerator}/{v.denominator}" for v in a)
        wtxt = str(w) if isinstance(w, PiPoly) else f"{w.numerator}/{w.denominator}"
        out.append(f"{coords} | {wtxt}")
    return "\n".join(out) + "\n"


def parse_orbit_design(text: str) -> OrbitDesign:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "orbit v1":
        raise ParseError("malformed header, expected 'orbit v1'", 1)
    vals = {}
    for i, key in enumerate(("measure", "dimension", "strength", "generators"), start=1):
        k, sep, v = lines[i].partition(":") if i < len(lines) else ("", "", "")
        if not sep or k.strip() != key:
            raise ParseError(f"malformed header, expected {key!r}", i + 1)
        vals[key] = v.strip()
    d, strength, n = int(vals["dimension"]), int(vals["strength"]), int(vals["generators"])
    body = [ln for ln in lines[5:] if ln.strip()]
    if len(body) != n:
        raise ParseError("generator count mismatch", 6)
    gens, ws = [], []
    for off, ln in enumerate(body):
        coords, sep, wtxt = ln.partition("|")
        if not sep:
            raise ParseError("expected 'coords | weight'", 6 + off)
        try:
            gens.append(tuple(Fraction(tok) for tok in coords.split()))
            w = PiPoly.parse(wtxt)
        except (ValueError, ZeroDivisionError):
            raise ParseError("bad generator line", 6 + off) from None
        ws.append(w if w.degree() > 0 else w.coeffs.get(0, Fraction(0)))
    return OrbitDesign(d, strength // 2, vals["measure"], tuple(gens), tuple(ws))


def read_orbit_design(path) -> OrbitDesign:
    return parse_orbit_design(Path(path).read_text(encoding="utf-8"))


def write_orbit_design(design: OrbitDesign, path) -> None:
    Path(path).write_text(format_orbit_design(design), encoding="utf-8")
