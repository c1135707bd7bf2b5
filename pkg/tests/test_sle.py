import math
import random

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grovedimer.combinatorics import Partition, pairing_from_partition
from grovedimer.dimers import balanced_subsets, dd_probabilities
from grovedimer.errors import DomainError, NumericToleranceError
from grovedimer.sle import (
    _pairing_rows,
    cross_ratio,
    gff_drift_residual,
    regular_polygon_points,
    scaling_ds_determinant,
    scaling_ds_product,
    sle2_probs,
    sle4_probs,
    sle8_probs,
    sle8_response,
)
from polyhelp import parse

SLE2_TRICHORDAL = {
    "12|34|56": "-15|26|34 +12|56|34 +14|26|35 +15|24|36 -14|25|36 +13|25|46 -12|35|46 -13|24|56",
    "16|23|45": "-16|24|35 +14|26|35 +15|24|36 -14|25|36 +16|23|45 -13|26|45 -15|23|46 +13|25|46",
    "14|23|56": "+15|24|36 -14|25|36 -15|23|46 +13|25|46 +14|23|56 -13|24|56",
    "25|16|34": "+16|25|34 -15|26|34 -16|24|35 +14|26|35 +15|24|36 -14|25|36",
    "36|12|45": "+14|26|35 -12|46|35 -14|25|36 -13|26|45 +12|36|45 +13|25|46",
}

SLE4_TRICHORDAL = {
    "12|34|56": "X12*X34*X56 + X14*X36*X52",
    "16|23|45": "X16*X32*X54 + X14*X36*X52",
    "14|23|56": "X14*X32*X56 - X14*X36*X52",
    "25|16|34": "X16*X34*X52 - X14*X36*X52",
    "36|12|45": "X12*X36*X54 - X14*X36*X52",
}


def increasing(k, lo=-5.0, hi=5.0, gap=0.2):
    return st.lists(st.floats(lo, hi), min_size=k, max_size=k).map(sorted).filter(
        lambda xs: min(b - a for a, b in zip(xs, xs[1:])) >= gap)


def _signed_terms(text):
    out = {}
    for tok in text.split():
        out[Partition.parse(tok[1:] if tok[0] in "+-" else tok)] = -1 if tok[0] == "-" else 1
    return out


# -- SLE2 --------------------------------------------------------------------

@pytest.mark.parametrize("label", sorted(SLE2_TRICHORDAL))
def test_sle2_trichordal_rows(label):
    sigma = pairing_from_partition(Partition.parse(label))
    got = {}
    for c, match in _pairing_rows(3)[sigma]:
        key = Partition([list(p) for p in match], 6)
        got[key] = got.get(key, 0) + c
    got = {k: v for k, v in got.items() if v}
    assert got == _signed_terms(SLE2_TRICHORDAL[label])


def test_sle2_symmetric_point():
    xs = [0.0, 1.0, 2.0, 3.0]
    assert cross_ratio(xs) == pytest.approx(0.25)
    # cross-ratio 1/2 configuration: 0, 1, 2, 2+... solve x2 = s t / (t - 1 + s) with t = 3
    s, t = 0.5, 3.0
    ys = [0.0, s * t / (t - 1 + s), 1.0, t]
    assert cross_ratio(ys) == pytest.approx(0.5, abs=1e-15)
    probs = sle2_probs(ys)
    assert probs["1-4|3-2"] == pytest.approx(0.5, abs=1e-14)
    assert probs.total() == pytest.approx(1.0)


@settings(max_examples=50, deadline=None)
@given(increasing(6))
def test_sle2_distribution(xs):
    p = sle2_probs(xs)
    assert p.total() == pytest.approx(1.0, abs=1e-12)
    assert all(v >= -1e-14 for _, v in p.items())


# -- SLE4 --------------------------------------------------------------------

@pytest.mark.parametrize("label", sorted(SLE4_TRICHORDAL))
def test_sle4_trichordal_rows(label):
    rng = random.Random(label)
    table = {}
    def X(i, j):
        return table.setdefault((min(i, j), max(i, j)), rng.uniform(0.5, 2.0))
    hat = dd_probabilities(X, 3)
    want = parse(SLE4_TRICHORDAL[label]).evaluate(lambda v: X(v[1], v[2]))
    sigma = pairing_from_partition(Partition.parse(label))
    assert hat.weight(sigma) == pytest.approx(want, rel=1e-12)


def test_sle4_symmetric():
    s, t = 0.5, 3.0
    ys = [0.0, s * t / (t - 1 + s), 1.0, t]
    assert sle4_probs(ys)["1-4|3-2"] == pytest.approx(0.5, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(increasing(4))
def test_sle4_cross_ratio(xs):
    x1, x2, x3, x4 = xs
    want = (x2 - x1) * (x4 - x3) / ((x3 - x1) * (x4 - x2))
    assert sle4_probs(xs)["1-4|3-2"] == pytest.approx(want, abs=1e-12)


# -- SLE8 --------------------------------------------------------------------

def test_polygon_points():
    assert regular_polygon_points(4) == pytest.approx([-1 / math.tan(math.pi * (k + 0.5) / 4) for k in range(4)])
    with pytest.raises(DomainError):
        regular_polygon_points(5)


@settings(max_examples=10, deadline=None)
@given(increasing(4, gap=0.3))
def test_sle8_two_intervals_elliptic(xs):
    lam = cross_ratio(xs)
    L = -sle8_response(xs)[0][1]
    assert L == pytest.approx(float(mpmath.ellipk(lam) / mpmath.ellipk(1 - lam)), rel=1e-10)
    p = sle8_probs(xs)
    assert p["12"] == pytest.approx(L / (L + 1), rel=1e-12)


def test_sle8_two_intervals_direct_quadrature():
    xs = [-1.3, 0.2, 0.9, 3.1]
    f = lambda w: 1 / mpmath.sqrt(abs(mpmath.fprod([w - x for x in xs])))
    with mpmath.workdps(30):
        side = mpmath.quad(f, [xs[0], xs[1]])
        gap = mpmath.quad(f, [xs[1], xs[2]])
    assert -sle8_response(xs)[0][1] == pytest.approx(float(side / gap), rel=1e-9)


def test_sle8_hexagon_and_octagon():
    lam = sle8_response(regular_polygon_points(6))
    for i in range(3):
        for j in range(3):
            if i != j:
                assert -lam[i][j] == pytest.approx(1 / math.sqrt(3), abs=1e-10)
    oct_lam = sle8_response(regular_polygon_points(8))
    for i in range(4):
        assert -oct_lam[i][(i + 1) % 4] == pytest.approx(0.5, abs=1e-10)
        assert -oct_lam[i][(i + 2) % 4] == pytest.approx(1 / math.sqrt(2) - 0.5, abs=1e-10)
    assert all(abs(sum(r)) < 1e-10 for r in oct_lam)


def test_sle8_extended_precision_octagon():
    lam = sle8_response(regular_polygon_points(8, dps=30), dps=30)
    with mpmath.workdps(30):
        assert abs(-lam[0][1] - mpmath.mpf(1) / 2) < mpmath.mpf(10) ** -20
        assert abs(-lam[0][2] - (1 / mpmath.sqrt(2) - mpmath.mpf(1) / 2)) < mpmath.mpf(10) ** -20


def test_sle8_quadrature_is_converged():
    xs = [-2.0, -0.7, 0.1, 0.6, 1.9, 4.0]
    a = sle8_response(xs, tol=1e-13)
    b = sle8_response(xs, tol=1e-15, max_order=16384)
    assert max(abs(a[i][j] - b[i][j]) for i in range(3) for j in range(3)) < 1e-10


def test_sle8_errors():
    with pytest.raises(NumericToleranceError):
        sle8_response([0.0, 1.0, 2.0, 3.0, 4.0, 5.0], tol=1e-30, max_order=64)
    with pytest.raises(DomainError):
        sle8_response([0.0, 1.0, 1.0, 2.0])
    with pytest.raises(DomainError):
        sle8_response([0.0, 1.0])
    with pytest.raises(DomainError):
        sle2_probs([0.0, 1.0, 2.0])


def test_sle8_dihedral_symmetry():
    lam = sle8_response(regular_polygon_points(8))
    for i in range(4):
        for j in range(4):
            assert lam[i][j] == pytest.approx(lam[(i + 1) % 4][(j + 1) % 4], abs=1e-10)
            assert lam[i][j] == pytest.approx(lam[(3 - i) % 4][(3 - j) % 4], abs=1e-10)


@settings(max_examples=10, deadline=None)
@given(increasing(6, gap=0.3), st.floats(0.2, 5.0), st.floats(-10, 10))
def test_affine_invariance(xs, a, b):
    ys = [a * x + b for x in xs]
    for fn in (sle2_probs, sle4_probs, sle8_probs):
        p, q = fn(xs), fn(ys)
        for k, v in p.items():
            assert q.probs[k] == pytest.approx(v, abs=1e-10)


# -- GFF ---------------------------------------------------------------------

def test_scaling_product_examples():
    xs = [0.0, 1.0, 2.5, 4.0]
    assert scaling_ds_product(xs, ()) == 1.0
    x1, x2, x3, x4 = xs
    # S = {1, 2}: exponent +1 on pairs of equal parity, -1 otherwise
    want = (x4 - x1) * (x3 - x2) / ((x3 - x1) * (x4 - x2))
    assert scaling_ds_product(xs, (1, 2)) == pytest.approx(want)
    assert scaling_ds_determinant(xs, (1, 2)) == pytest.approx(want)
    with pytest.raises(DomainError):
        scaling_ds_product(xs, (1, 3))


def test_gff_trivial_subset():
    assert gff_drift_residual([0.0, 1.0, 2.0, 3.0], ()) == 0.0


@settings(max_examples=30, deadline=None)
@given(increasing(6))
def test_gff_residual_and_determinant(xs):
    for S in balanced_subsets(3):
        assert abs(gff_drift_residual(xs, S)) < 1e-8
        det = scaling_ds_determinant(xs, S)
        assert scaling_ds_product(xs, S) == pytest.approx(det, rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(increasing(4, gap=0.5))
def test_gff_finite_difference_agrees(xs):
    for S in balanced_subsets(2):
        fd = gff_drift_residual(xs, S, method="finite-difference")
        an = gff_drift_residual(xs, S)
        assert abs(fd - an) < 1e-6


def test_gff_unknown_method():
    with pytest.raises(ValueError):
        gff_drift_residual([0.0, 1.0, 2.0, 3.0], (1, 2), method="magic")
