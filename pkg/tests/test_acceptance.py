"""Acceptance gate: one test per numbered criterion, each printing a
PASS/FAIL line (collected again in the terminal summary)."""
from __future__ import annotations

import json
import math
import random
import time
from fractions import Fraction
from pathlib import Path

from polyhelp import det_poly, parse, xmat

from grovedimer import exact
from grovedimer.circuit import (
    dual_graph,
    gluing_matrix,
    quotient_graph,
    resistances,
    response_matrix,
)
from grovedimer.combinatorics import (
    OddEvenPairing,
    Partition,
    crossing_count,
    enumerate_odd_even_pairings,
    enumerate_partitions,
    enumerate_planar_pairings,
    enumerate_planar_partitions,
    permutation_sign,
    stirling_first_unsigned,
)
from grovedimer.dimers import (
    balanced_subsets,
    d_s,
    dd_probabilities,
    enumerate_double_dimers,
    kasteleyn,
    verify_bridge_identity,
    z_bw_wb,
)
from grovedimer.graphio import build_fixture, grid_graph
from grovedimer.groves import (
    enumerate_groves,
    grove_probabilities,
    l_tau_poly,
    r_polynomials,
    verify_general_graph_identity,
)
from grovedimer.meander import cycle_count, gram_2, gram_t
from grovedimer.polynomial import Poly, pair_var
from grovedimer.projection import (
    clear_caches,
    projection_dd,
    projection_groves,
    rule1_rewrite,
    rule1_rewrite_random,
    rule2_rewrite,
    rule2_rewrite_random,
    sign_specialization_check,
)
from grovedimer.sle import (
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

DATA = Path(__file__).parent / "data"


# -- shared helpers ----------------------------------------------------------

def _golden_mismatches(P, path, parse_label):
    gold = json.loads(path.read_text())
    bad = 0
    for r, row in zip(gold["rows"], gold["entries"]):
        for c, v in zip(gold["cols"], row):
            if P.entry(parse_label(r), parse_label(c)) != v:
                bad += 1
    shape_ok = P.shape == (len(gold["rows"]), len(gold["cols"]))
    return bad, shape_ok


def grove_row_poly(P, sigma) -> Poly:
    out = Poly()
    for c, tau in zip(P.entries[P.rows.index(sigma)], P.cols):
        if c:
            out = out + l_tau_poly(tau) * c
    return out


def dd_row_poly(P, sigma) -> Poly:
    out = Poly()
    for c, tau in zip(P.entries[P.rows.index(sigma)], P.cols):
        if c:
            sign = -1 if crossing_count(tau) % 2 else 1
            out = out + Poly.monomial([pair_var("X", a, b) for a, b in tau.pairs()], c * sign)
    return out


def _relabel_poly(p: Poly, g) -> Poly:
    return p.rename(lambda v: pair_var(v[0], g(v[1]), g(v[2])))


def _dihedral(n):
    for k in range(n):
        yield lambda i, k=k: (i - 1 + k) % n + 1
        yield lambda i, k=k: (-i + k) % n + 1


def _cyclic(n):
    for k in range(n):
        yield lambda i, k=k: (i - 1 + k) % n + 1


def _pairing_image(sigma: OddEvenPairing, g) -> OddEvenPairing:
    return OddEvenPairing.from_pairs([(g(a), g(b)) for a, b in sigma.pairs()])


# -- 1 -----------------------------------------------------------------------

def test_criterion_01_projection_golden(criterion):
    def body():
        clear_caches()
        t = time.perf_counter()
        Pg = projection_groves(4)
        Pd = projection_dd(4)
        dt = time.perf_counter() - t
        bg, sg = _golden_mismatches(Pg, DATA / "projection_groves_n4.json", Partition.parse)
        bd, sd = _golden_mismatches(Pd, DATA / "projection_dd_n4.json", OddEvenPairing.parse)
        ok = bg == 0 and bd == 0 and sg and sd and dt < 1.0
        return ok, f"groves 14x15 mismatches={bg}, dd 14x24 mismatches={bd}, {dt:.3f}s"
    criterion(1, body)


# -- 2 -----------------------------------------------------------------------

GROVE_L = {
    2: {"12": "L12", "1|2": "1"},
    3: {"123": "L12*L13 + L12*L23 + L13*L23", "1|23": "L23", "13|2": "L13", "12|3": "L12", "1|2|3": "1"},
}
GROVE_R = {
    2: {"12": "1", "1|2": "R12"},
    3: {
        "123": "1",
        "1|23": "1/2*R13 + 1/2*R12 - 1/2*R23",
        "13|2": "1/2*R23 + 1/2*R12 - 1/2*R13",
        "12|3": "1/2*R13 + 1/2*R23 - 1/2*R12",
        "1|2|3": "1/2*R12*R13 + 1/2*R12*R23 + 1/2*R13*R23 - 1/4*R12^2 - 1/4*R23^2 - 1/4*R13^2",
    },
}
# one representative per dihedral class on four nodes
DISPLAY_N4_R = {
    "1234": "1",
    "134|2": "1/2*R23 + 1/2*R12 - 1/2*R13",
    "14|23": "1/2*R13 + 1/2*R24 - 1/2*R14 - 1/2*R23",
    "1|2|34": "(R12*R13 + R12*R23 + R12*R14 + R12*R24 - 2*R12*R34 - R12^2"
              " + R13*R24 + R14*R23 - R13*R14 - R23*R24)/4",
    "1|24|3": "(R13*R12 + R13*R23 + R13*R14 + R13*R34 - 2*R13*R24 - R13^2"
              " + R12*R34 + R14*R23 - R12*R14 - R23*R34)/4",
    "1|2|3|4": "(R12*R23*R34 + R12*R24*R43 + R13*R32*R24 + R13*R34*R42"
               " + R14*R42*R23 + R14*R43*R32 + R21*R13*R34 + R21*R14*R43"
               " + R23*R31*R14 + R24*R41*R13 + R31*R12*R24 + R32*R21*R14"
               " - R12*R23*R31 - R12*R24*R41 - R13*R34*R41 - R23*R34*R42"
               " - R12*R34^2 - R12^2*R34 - R13*R24^2 - R13^2*R24 - R14*R23^2 - R14^2*R23)/4",
}
DISPLAY_N4_L = {
    "1234": "L12*L13*L14 + L12*L23*L24 + L13*L23*L34 + L14*L24*L34 + L12*L23*L34 + L13*L23*L24"
            " + L12*L24*L34 + L14*L23*L24 + L12*L13*L24 + L12*L14*L23 + L13*L24*L34 + L14*L23*L34"
            " + L13*L14*L23 + L12*L13*L34 + L13*L14*L24 + L12*L14*L34",
    "134|2": "L13*L14 + L14*L34 + L13*L34 + L13*L24",
    "14|23": "L14*L23 - L13*L24",
    "1|2|34": "L34",
    "1|24|3": "L24",
    "1|2|3|4": "1",
}
DISPLAY_N4_L_TAU = {"134|2": "L[134|2] + L[13|24]", "14|23": "L[14|23] - L[13|24]"}

DD_DISPLAYS = {
    2: {"1-2|3-4": "X12*X34", "1-4|3-2": "X14*X23"},
    3: {
        "1-2|3-6|5-4": "X36*X12*X45 - X36*X14*X25",
        "1-2|3-4|5-6": "X14*X25*X36 + X12*X34*X56",
    },
    4: {
        "1-2|3-8|5-6|7-4": "X12*X74*X38*X56 - X12*X74*X58*X36 - X14*X72*X38*X56 + X14*X72*X58*X36",
        "1-2|3-4|5-6|7-8": "X12*X34*X56*X78 + X14*X38*X56*X72 + X16*X34*X58*X72 + X16*X38*X52*X74"
                           " + X12*X36*X58*X74 + X14*X36*X52*X78 - 2*X14*X36*X58*X72",
    },
}
DD_DETERMINANTS = {
    "1-2|3-8|5-6|7-4": (-1, ["X12 X14 0 0", "0 0 X36 X38", "0 0 X56 X58", "X72 X74 0 0"]),
    "1-2|3-8|5-4|7-6": (1, ["X12 X14 X16 0", "0 0 X36 X38", "X52 X54 0 X58", "X72 X74 X76 0"]),
}


def _grove_display_checks():
    failures = []
    count = 0
    for n, table in GROVE_L.items():
        P = projection_groves(n)
        for label, text in table.items():
            count += 1
            if grove_row_poly(P, Partition.parse(label)) != parse(text):
                failures.append(f"L n={n} {label}")
    for n, table in GROVE_R.items():
        polys = r_polynomials(n)
        for label, text in table.items():
            count += 1
            if polys[Partition.parse(label)] != parse(text):
                failures.append(f"R n={n} {label}")
    P4 = projection_groves(4)
    R4 = r_polynomials(4)
    for kind, table in (("L", DISPLAY_N4_L), ("R", DISPLAY_N4_R)):
        covered = set()
        for label, text in table.items():
            base = Partition.parse(label)
            want = parse(text)
            for g in _dihedral(4):
                image = base.relabel(g)
                if image in covered:
                    continue
                covered.add(image)
                count += 1
                got = grove_row_poly(P4, image) if kind == "L" else R4[image]
                if got != _relabel_poly(want, g):
                    failures.append(f"{kind} n=4 {image}")
        if covered != set(enumerate_planar_partitions(4)):
            failures.append(f"{kind} n=4 orbit coverage")
    for label, text in DISPLAY_N4_L_TAU.items():
        count += 1
        if grove_row_poly(P4, Partition.parse(label)) != parse(text):
            failures.append(f"L_tau n=4 {label}")
    return count, failures


def _dd_display_checks():
    failures = []
    count = 0
    for n, table in DD_DISPLAYS.items():
        P = projection_dd(n)
        covered = set()
        for label, text in table.items():
            base = OddEvenPairing.parse(label)
            want = parse(text)
            for g in _cyclic(2 * n):
                image = _pairing_image(base, g)
                count += 1
                covered.add(image)
                if dd_row_poly(P, image) != _relabel_poly(want, g):
                    failures.append(f"dd 2n={2 * n} {image}")
        if n == 4:
            for label, (sign, rows) in DD_DETERMINANTS.items():
                base = OddEvenPairing.parse(label)
                want = det_poly(xmat(rows)) * sign
                for g in _cyclic(8):
                    image = _pairing_image(base, g)
                    count += 1
                    covered.add(image)
                    if dd_row_poly(P, image) != _relabel_poly(want, g):
                        failures.append(f"dd det 2n=8 {image}")
        if covered != set(enumerate_planar_pairings(n)):
            failures.append(f"dd 2n={2 * n} orbit coverage")
    return count, failures


def test_criterion_02_polynomial_displays(criterion):
    def body():
        c1, f1 = _grove_display_checks()
        c2, f2 = _dd_display_checks()
        fails = f1 + f2
        return not fails, f"{c1} grove and {c2} double-dimer rows compared; failures={fails[:5]}"
    criterion(2, body)


# -- 3 -----------------------------------------------------------------------

def _matmul_int(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def test_criterion_03_gram_systems(criterion):
    def body():
        notes = []
        ok = True
        for n in range(1, 6):
            M = gram_t(n)
            E = gram_t(n, extended=True)
            P = projection_groves(n)
            good = (list(E.col_labels) == list(P.cols)
                    and _matmul_int(M.rows(), P.entries) == E.rows() and M.determinant() != 0)
            ok &= good
            notes.append(f"t{n}:{'ok' if good else 'bad'}")
        for n in range(1, 5):
            M = gram_2(n)
            E = gram_2(n, extended=True)
            P = projection_dd(n)
            good = (list(E.col_labels) == list(P.cols)
                    and _matmul_int(M.rows(), P.entries) == E.rows() and M.determinant() != 0)
            ok &= good
            notes.append(f"2:{n}:{'ok' if good else 'bad'}")
        return ok, " ".join(notes)
    criterion(3, body)


# -- 4 -----------------------------------------------------------------------

def test_criterion_04_grove_oracle(criterion):
    def body():
        t = time.perf_counter()
        notes = []
        ok = True
        for name in ("triangle", "square_star", "grid_2x2", "grid_3x3"):
            g = build_fixture(name)
            dist = enumerate_groves(g)
            vals = grove_probabilities(response_matrix(g))
            unc = dist.uncrossing()
            good = (all(dist.Z(s) / unc == v for s, v in vals.items())
                    and set(dist.weights) <= set(vals))
            ok &= good
            notes.append(f"{name}:{'ok' if good else 'bad'}")
        for name in ("k4", "k5_minus_edge"):
            g = build_fixture(name)
            good = verify_general_graph_identity(g)
            nonplanar = enumerate_groves(g).Z("13|24") != 0
            ok &= good and nonplanar
            notes.append(f"{name}:{'ok' if good else 'bad'}")
        dt = time.perf_counter() - t
        return ok and dt < 30, " ".join(notes) + f" {dt:.2f}s"
    criterion(4, body)


# -- 5 -----------------------------------------------------------------------

def test_criterion_05_double_dimer_oracle(criterion):
    def body():
        t = time.perf_counter()
        notes = []
        ok = True
        for rows, cols in ((2, 2), (2, 4), (4, 4)):
            g = grid_graph(rows, cols, "corners")
            kd = kasteleyn(g)
            orc = enumerate_double_dimers(g)
            zbw, _ = z_bw_wb(g)
            hat = dd_probabilities(kd)
            match = (set(orc.weights) <= set(hat.weights)
                     and all(orc.weight(s) / zbw ** 2 == hat.weight(s) for s in hat.weights))
            bridges = all(verify_bridge_identity(g, S, kd=kd, oracle=orc) for S in balanced_subsets(kd.n))
            ok &= match and bridges
            notes.append(f"{rows}x{cols}:{'ok' if match and bridges else 'bad'}")
        dt = time.perf_counter() - t
        return ok and dt < 60, " ".join(notes) + f" {dt:.2f}s"
    criterion(5, body)


# -- 6 -----------------------------------------------------------------------

ORACLE_GRAPHS = ("triangle", "square_star", "k4", "k5_minus_edge", "grid_2x2", "grid_2x3", "grid_2x4", "grid_3x3")


def _electrical_checks(g):
    dist = enumerate_groves(g)
    lam = response_matrix(g)
    R = resistances(lam)
    n = g.n
    ratio = dist.tree() / dist.uncrossing()
    full = lam.rows()
    for k in range(n):
        keep = [i for i in range(n) if i != k]
        if exact.det(exact.submatrix(full, keep, keep)) != ratio:
            return "det"
    items = list(range(1, n + 1))
    for i in items:
        for j in items:
            if i >= j:
                continue
            total = Fraction(0)
            for sigma, w in dist.weights.items():
                if sigma.num_parts == 2:
                    blk = sigma.block_of()
                    if blk[i] != blk[j]:
                        total += w
            if total / dist.tree() != R.R(i, j):
                return "prop R"
            sigma = Partition([[i, j]] + [[k] for k in items if k not in (i, j)], n)
            if dist.Z(sigma) / dist.uncrossing() != lam.L(i, j):
                return "prop L"
    for sigma in enumerate_partitions(n):
        S = gluing_matrix(sigma)
        want = exact.matmul(exact.matmul(S, full), exact.transpose(S))
        if response_matrix(quotient_graph(g, sigma)).rows() != want:
            return f"SLS {sigma}"
    return None


def test_criterion_06_electrical_identities(criterion):
    def body():
        bad = {}
        for name in ORACLE_GRAPHS:
            why = _electrical_checks(build_fixture(name))
            if why:
                bad[name] = why
        return not bad, f"{len(ORACLE_GRAPHS)} graphs; failures={bad}"
    criterion(6, body)


# -- 7 -----------------------------------------------------------------------

def _chord_crosses_dual(a, b, i, j, n):
    # dual node i sits between primal nodes i and i+1
    lo, hi = min(i, j), max(i, j)
    inside = lambda x: lo < x <= hi
    return inside(a) != inside(b)


def _duality_ok(g) -> bool:
    n = g.n
    R = resistances(response_matrix(g))
    dual = dual_graph(g)
    lam_d = response_matrix(dual)
    R_d = resistances(lam_d)
    lam = response_matrix(g)
    Rw = lambda i, j: Fraction(0) if (i - 1) % n == (j - 1) % n else R.R((i - 1) % n + 1, (j - 1) % n + 1)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            want = (Rw(i, j) + Rw(i + 1, j + 1) - Rw(i, j + 1) - Rw(i + 1, j)) / 2
            if lam_d.L(i, j) != want:
                return False
            cross = sum((lam.L(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)
                         if _chord_crosses_dual(a, b, i, j, n)), Fraction(0))
            if R_d.R(i, j) != cross:
                return False
    return True


def _random_grid(rng):
    rows, cols = rng.randint(2, 4), rng.randint(2, 4)
    g = grid_graph(rows, cols, "boundary")
    weights = [Fraction(rng.randint(1, 5), rng.randint(1, 3)) for _ in g.edges]
    bnd = list(g.nodes)
    k = rng.randint(3, min(6, len(bnd)))
    chosen = sorted(rng.sample(range(len(bnd)), k))
    return grid_graph(rows, cols, [bnd[c] for c in chosen], weights)


def test_criterion_07_duality(criterion):
    def body():
        rng = random.Random(7)
        graphs = [build_fixture("square_star")] + [_random_grid(rng) for _ in range(8)]
        results = [_duality_ok(g) for g in graphs]
        return all(results), f"square_star and {len(graphs) - 1} random weighted grids: {results}"
    criterion(7, body)


# -- 8 -----------------------------------------------------------------------

def test_criterion_08_sign_specialization(criterion):
    def body():
        res = {n: sign_specialization_check(n) for n in range(1, 5)}
        return all(res.values()), f"n=1..4: {res}"
    criterion(8, body)


# -- 9, 10 -------------------------------------------------------------------

def _points_with_cross_ratio(s, rng):
    # x1=0, x2=s', x3=1, x4=inf would be simplest; keep all finite instead
    a = rng.uniform(-3, 3)
    scale = rng.uniform(0.5, 4)
    # solve for x2 given x1=0, x3=1, x4=t with cross-ratio s
    t = rng.uniform(1.5, 6)
    # s = (t-1) x2 / ((t - x2) * 1)  =>  x2 = s t / (t - 1 + s)
    x2 = s * t / (t - 1 + s)
    return [a + scale * x for x in (0.0, x2, 1.0, t)]


def test_criterion_09_sle2_bichordal(criterion):
    def body():
        rng = random.Random(9)
        worst = 0.0
        for _ in range(50):
            s = rng.uniform(0.01, 0.99)
            xs = _points_with_cross_ratio(s, rng)
            assert abs(cross_ratio(xs) - s) < 1e-12
            want = (2 * s ** 3 - s ** 4) / (1 - 2 * s + 4 * s ** 3 - 2 * s ** 4)
            worst = max(worst, abs(sle2_probs(xs)["1-4|3-2"] - want))
        return worst < 1e-12, f"max error {worst:.2e} over 50 cross-ratios"
    criterion(9, body)


def test_criterion_10_sle4_bichordal(criterion):
    def body():
        rng = random.Random(10)
        worst = 0.0
        for _ in range(50):
            xs = sorted(rng.uniform(-10, 10) for _ in range(4))
            x1, x2, x3, x4 = xs
            want = (x2 - x1) * (x4 - x3) / ((x3 - x1) * (x4 - x2))
            worst = max(worst, abs(sle4_probs(xs)["1-4|3-2"] - want))
        return worst < 1e-12, f"max error {worst:.2e} over 50 configurations"
    criterion(10, body)


# -- 11 ----------------------------------------------------------------------

def test_criterion_11_sle8_closed_forms(criterion):
    def body():
        t = time.perf_counter()
        hexa = sle8_probs(regular_polygon_points(6))
        errs = [abs(hexa["1|2|3"] - (2 - math.sqrt(3))), abs(hexa["123"] - (2 - math.sqrt(3)))]
        errs += [abs(hexa[k] - (2 / math.sqrt(3) - 1)) for k in ("12|3", "13|2", "1|23")]
        lam = sle8_response(regular_polygon_points(8))
        errs += [abs(-lam[i][(i + 1) % 4] - 0.5) for i in range(4)]
        errs += [abs(-lam[i][(i + 2) % 4] - (1 / math.sqrt(2) - 0.5)) for i in range(4)]
        octa = sle8_probs(regular_polygon_points(8))
        errs.append(abs(octa["1|2|34"] - (2 - math.sqrt(2)) / 8))
        dt = time.perf_counter() - t
        worst = max(errs)
        return worst < 1e-6 and dt < 10, f"max error {worst:.2e}, {dt:.2f}s"
    criterion(11, body)


# -- 12 ----------------------------------------------------------------------

def _spread_points(rng, k, gap=0.1):
    while True:
        xs = sorted(rng.uniform(-5, 5) for _ in range(k))
        if min(b - a for a, b in zip(xs, xs[1:])) >= gap:
            return xs


def test_criterion_12_gff_martingale(criterion):
    def body():
        rng = random.Random(12)
        worst_res = 0.0
        worst_rel = 0.0
        for n in (2, 3):
            for _ in range(20):
                xs = _spread_points(rng, 2 * n)
                for S in balanced_subsets(n):
                    worst_res = max(worst_res, abs(gff_drift_residual(xs, S)))
                    prod = scaling_ds_product(xs, S)
                    det = scaling_ds_determinant(xs, S)
                    worst_rel = max(worst_rel, abs(prod - det) / abs(det))
        ok = worst_res < 1e-8 and worst_rel < 1e-10
        return ok, f"max |residual| {worst_res:.2e}, max product/determinant rel. error {worst_rel:.2e}"
    criterion(12, body)


# -- 13 ----------------------------------------------------------------------

def _stirling_ok(n) -> bool:
    # sum_k c(n,k) x^k = x (x+1) ... (x+n-1)
    for x in range(-2, n + 3):
        rising = 1
        for i in range(n):
            rising *= x + i
        if sum(stirling_first_unsigned(n, k) * x ** k for k in range(n + 1)) != rising:
            return False
    pairings = enumerate_odd_even_pairings(n)
    for rho in pairings:
        for q in range(0, n + 3):
            total = sum(permutation_sign(s.permutation()) * q ** cycle_count(rho, s) for s in pairings)
            if (total == 0) != (q < n):
                return False
    return True


def _rewrite_independence(seeds) -> bool:
    parts = enumerate_partitions(4)
    pairs = enumerate_odd_even_pairings(4)
    det1 = {t: rule1_rewrite(t) for t in parts}
    det2 = {t: rule2_rewrite(t) for t in pairs}
    for seed in range(seeds):
        rng = random.Random(seed)
        for t in parts:
            if rule1_rewrite_random(t, rng) != det1[t]:
                return False
        for t in pairs:
            if rule2_rewrite_random(t, rng) != det2[t]:
                return False
    return True


def _moebius_worst(rng) -> float:
    worst = 0.0
    maps = [lambda x: 3.5 * x - 2.0, lambda x: 0.25 * x + 7.0]
    for m in (2, 3, 4):
        xs = [x + 6.0 for x in _spread_points(rng, 2 * m, 0.3)]  # all positive
        images = [[f(x) for x in xs] for f in maps] + [[-1.0 / x for x in xs]]
        for fn in (sle2_probs, sle4_probs, sle8_probs):
            base = fn(xs).probs
            for ys in images:
                other = fn(ys).probs
                worst = max(worst, max(abs(base[k] - other[k]) for k in base))
    return worst


def test_criterion_13_property_suites(criterion):
    def body():
        stirling = all(_stirling_ok(n) for n in range(1, 6))
        rewrite = _rewrite_independence(100)
        moebius = _moebius_worst(random.Random(13))
        ok = stirling and rewrite and moebius < 1e-10
        return ok, f"stirling n<=5: {stirling}, rewrite independence (100 seeds): {rewrite}, moebius max dev {moebius:.2e}"
    criterion(13, body)


if __name__ == "__main__":
    import sys

    failed = []

    def run(number, body):
        try:
            ok, detail = body()
        except Exception as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        print(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        if not ok:
            failed.append(number)

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            fn(run)
    sys.exit(1 if failed else 0)
