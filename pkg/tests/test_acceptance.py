"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

The lines are printed by the test itself (visible with ``-s``) and again in
the terminal summary.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from designforge.approx import (
    construct_tensor_approx,
    epsilon_l2,
    tensor_discrepancy,
    tensor_discrepancy_bruteforce,
    tensor_lower_bound,
    uniform_sphere,
)
from designforge.builders import (
    cross_polytope,
    gaussian_product_design,
    partition_count,
    signed_design,
)
from designforge.ffield import twise_construct, twise_verify
from designforge.gegenbauer import (
    approx_lower_bound,
    dim_W,
    expand_Q_square,
    gegenbauer_C,
    gegenbauer_Q,
    linearization_coeffs,
    lp_bound,
    poly_eval,
    poly_mul,
)
from designforge.kernel import WeightedPointSet
from designforge.transfer import gaussian_to_spherical, project_spherical, spherical_to_gaussian
from designforge.verify import verify_design, verify_odd_vanishing

SEED = 0


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_1_cross_polytope_certificate():
    start = time.perf_counter()
    ok, notes = True, []
    for d in range(1, 11):
        X = cross_polytope(d)
        ok &= verify_design(X, 3, "exact").passed
        rep = verify_design(X, 4, "exact")
        if d == 1:
            # {+-1} reproduces every moment of S^0, so strength 4 holds
            ok &= rep.passed
        else:
            ok &= (not rep.passed) and rep.worst_residual == Fraction(d - 1, d * (d + 2))
        if d == 3:
            notes.append(f"d=3 residual {rep.worst_residual} at x1^4")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 1.0
    report(1, ok, f"d=1..10 exact at t=3; {notes[0]}; {elapsed:.2f}s")


def _expand_in_C(poly, lam, top):
    rest = list(poly) + [Fraction(0)] * (top + 1 - len(poly))
    out = {}
    for k in range(top, -1, -1):
        ck = gegenbauer_C(k, lam)
        if rest[k]:
            out[k] = rest[k] / ck[k]
            for i, c in enumerate(ck):
                rest[i] -= out[k] * c
    return out


def test_criterion_2_gegenbauer_identities():
    ok = True
    for d in range(3, 11):
        for k in range(9):
            expected = math.comb(d + k - 1, d - 1) - (math.comb(d + k - 3, d - 1) if k >= 2 else 0)
            ok &= poly_eval(gegenbauer_Q(k, d), Fraction(1)) == expected == dim_W(d, k)
    checked = 0
    for lam in (Fraction(1, 2), Fraction(1), Fraction(3, 2)):
        for m in range(5):
            for n in range(5):
                oracle = _expand_in_C(poly_mul(gegenbauer_C(m, lam), gegenbauer_C(n, lam)), lam, m + n)
                got = {m + n - 2 * k: v for k, v in linearization_coeffs(m, n, lam).items() if v}
                ok &= got == oracle
                checked += 1
    report(2, ok, f"Q_k^d(1) for d=3..10, k=0..8; {checked} linearizations match products")


def test_criterion_3_pairwise_sum_zero():
    c = epsilon_l2(cross_polytope(3), 3)
    report(3, c.epsilon_achieved <= 1e-12, f"epsilon_l2 = {c.epsilon_achieved!r}")


def test_criterion_4_transfer_round_trip():
    ok, sizes = True, []
    for d in range(1, 7):
        X = cross_polytope(d)
        S = gaussian_to_spherical(spherical_to_gaussian(X, 3), 3)
        ok &= verify_design(S, 3, "float", 1e-8).passed and len(S) <= 2 * 2 * (2 * d)
        sizes.append(len(S))
    P = project_spherical(cross_polytope(5), 3, 3)
    rep = verify_design(P, 3, "float", 1e-8)
    ok &= rep.passed and P.dimension == 3
    report(4, ok, f"round-trip sizes {sizes}; projection 5->3 has {len(P)} points, "
                  f"residual {rep.max_residual():.1e}")


def test_criterion_5_product_pipeline():
    X, arr = gaussian_product_design(8, 3, 2, SEED, with_array=True)
    rep = verify_design(X, 3, "float", 1e-9)
    tw = twise_verify(arr, 3)
    ok = rep.passed and len(X) <= (8 * 2 * 8) ** 2 and tw.passed
    report(5, ok, f"{len(X)} points, residual {rep.max_residual():.1e}, array 3-wise independent: {tw.passed}")


def test_criterion_6_signed_exactness():
    ok, sizes = True, []
    for measure in ("gaussian", "sphere"):
        for d in (4, 6):
            for t in (1, 2, 3):
                D = signed_design(d, t, measure, SEED)
                X = D.materialize()
                ok &= verify_design(X, 2 * t, "exact").passed
                ok &= verify_odd_vanishing(X, 2 * t + 4).passed
                ok &= len(X) <= partition_count(t, d) * 2**t * d**t
                sizes.append(len(X))
    report(6, ok, f"12 exact designs, largest {max(sizes)} points")


def test_criterion_7_lp_bound():
    g = expand_Q_square(1, 4)
    ok = lp_bound(g, 1.0, 2, exact=True) == 3 and lp_bound(g, 0.0, 2, exact=True) == 4
    ratios = [approx_lower_bound(d, 2, 0.0) / d**2 for d in range(6, 31)]
    band = max(ratios) / min(ratios)
    ok &= band <= 3
    report(7, ok, f"lp_bound 3 and 4; ratio band {band:.3f} over d=6..30")


def test_criterion_8_tensor_tightness():
    ok = tensor_lower_bound(100, 1, 0.1) == 50
    X = construct_tensor_approx(16, 1, 0.1, SEED)
    disc = tensor_discrepancy(X, 1)
    ok &= len(X) == 100 and disc <= 0.1
    k = 100
    sq = [tensor_discrepancy(WeightedPointSet(uniform_sphere(k, 16, np.random.default_rng(s)), np.full(k, 1 / k),
                                              "sphere", "unweighted"), 1) ** 2 for s in range(50)]
    mean_sq = float(np.mean(sq))
    ok &= mean_sq <= 1.5 / k
    rng = np.random.default_rng(SEED)
    gap = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 15))
        w = rng.random(n) + 0.05
        Y = WeightedPointSet(uniform_sphere(n, 3, rng), w / w.sum(), "sphere", "weighted")
        gap = max(gap, abs(tensor_discrepancy(Y, 1) - tensor_discrepancy_bruteforce(Y, 1)))
    ok &= gap <= 1e-10
    report(8, ok, f"bound 50; 100 points at discrepancy {disc:.4f}; mean sq {mean_sq:.5f} <= {1.5 / k}; "
                  f"Gram gap {gap:.1e}")


DS = [4, 6, 8, 12]


def _slope(sizes):
    return float(np.polyfit(np.log(DS), np.log(sizes), 1)[0])


@pytest.mark.parametrize("t", [3, 4])
def test_criterion_9_product_growth(t):
    sizes = [len(twise_construct(2, d, t, SEED)) for d in DS]
    s = _slope(sizes)
    report(9, abs(s - (t - 1)) <= 0.5, f"product t={t}: sizes {sizes}, slope {s:.2f} vs {t - 1}")


@pytest.mark.parametrize("strength", [2, 4, 6])
def test_criterion_9_signed_growth(strength):
    sizes = [signed_design(d, strength // 2, "gaussian", SEED).size() for d in DS]
    s = _slope(sizes)
    report(9, abs(s - strength // 2) <= 0.5,
           f"signed strength {strength}: sizes {sizes}, slope {s:.2f} vs {strength // 2}")
