"""Compare the numba and numpy paths of the two hot kernels.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from grovedimer import _accel
from grovedimer.graphio import build_fixture
from grovedimer.sle import regular_polygon_points


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def bench_groves(name, repeat):
    g = build_fixture(name)
    node_of = np.full(g.num_vertices, -1)
    for k, v in enumerate(g.nodes):
        node_of[v] = k
    us = [u for u, _, _ in g.edges]
    vs = [v for _, v, _ in g.edges]
    run = lambda flag: _accel.classify_groves(us, vs, g.num_vertices, node_of, g.n, use_numba=flag)
    run(True)  # compile
    t_nb, (m1, c1) = _best(lambda: run(True), repeat)
    t_np, (m2, c2) = _best(lambda: run(False), repeat)
    same = np.array_equal(m1, m2) and np.array_equal(c1, c2)
    return f"classify_groves {name:<8} 2^{len(g.edges)} subsets", t_nb, t_np, same


def bench_quadrature(order, repeat):
    xs = np.array(regular_polygon_points(8))
    t, w = np.polynomial.legendre.leggauss(order)

    def run(flag):
        return [_accel.sc_segment_sum(t, w, (xs[a] + xs[a + 1]) / 2, (xs[a + 1] - xs[a]) / 2, xs, p, a, a + 1,
                                      use_numba=flag) for a in range(7) for p in range(3)]

    run(True)
    t_nb, r1 = _best(lambda: run(True), repeat)
    t_np, r2 = _best(lambda: run(False), repeat)
    return f"sc_segment_sum order {order:<5}", t_nb, t_np, np.allclose(r1, r2, rtol=1e-12, atol=1e-12)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        print("numba unavailable (or GROVEDIMER_NUMBA=0); only the numpy path can run")
        return
    rows = [bench_groves(name, args.repeat) for name in ("grid_2x2", "square_star", "k5_minus_edge", "grid_3x3", "grid_3x4")]
    rows += [bench_quadrature(order, args.repeat) for order in (256, 4096)]
    print(f"{'kernel':<42}{'numba s':>10}{'numpy s':>10}{'speedup':>9}  agree")
    for label, a, b, same in rows:
        print(f"{label:<42}{a:>10.4f}{b:>10.4f}{b / a:>9.1f}  {same}")


if __name__ == "__main__":
    main()
