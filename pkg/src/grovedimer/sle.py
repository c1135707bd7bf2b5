"""Scaling-limit connection probabilities for multichordal SLE with
kappa = 2, 4, 8, plus the GFF martingale drift check.

All functions take boundary points ``x_1 < ... < x_{2m}`` on the real line
of the upper half-plane.

SLE8 branch bookkeeping: for real ``w`` approached from above,
``(w - x)^{1/2} = i |w - x|^{1/2}`` when ``w < x``.  On the segment
``(x_a, x_{a+1})`` exactly ``r = 2m - a`` points lie to the right, so the
integrand of ``g_p`` equals ``i^{-(r+1)} w^p / prod |w - x_j|^{1/2}``.  Gap
segments (``a`` even) are purely imaginary, interval segments (``a`` odd)
are real.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _accel
from .combinatorics import (
    OddEvenPairing,
    Partition,
    enumerate_planar_pairings,
    perfect_matchings,
)
from .dimers import balanced_subsets, d_s, dd_probabilities
from .errors import DomainError, NumericToleranceError
from .groves import grove_probabilities
from .projection import _rule1


@dataclass(frozen=True)
class SleDistribution:
    probs: Mapping[object, float]

    def __getitem__(self, key):
        if isinstance(key, str):
            key = next(k for k in self.probs if k.label == key)
        return self.probs[key]

    def items(self):
        return self.probs.items()

    def total(self) -> float:
        return float(sum(self.probs.values()))


def _check_points(xs, even=True, dps=None) -> list:
    if dps:
        import mpmath
        with mpmath.workdps(dps):
            xs = [mpmath.mpf(x) for x in xs]
    else:
        xs = [float(x) for x in xs]
    if any(not math.isfinite(x) for x in xs):
        raise DomainError("points must be finite")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise DomainError("points must be strictly increasing")
    if even and (len(xs) < 2 or len(xs) % 2):
        raise DomainError("need an even number (at least 2) of points")
    return xs


def _normalized(raw: Mapping) -> SleDistribution:
    total = sum(raw.values())
    return SleDistribution({k: float(v / total) for k, v in sorted(raw.items())})


# -- SLE2 --------------------------------------------------------------------

@lru_cache(maxsize=None)
def _pairing_rows(m: int):
    """{planar pairing: [(coefficient, matching pairs)]} restricted to
    perfect-matching columns."""
    planar = {p.as_partition(): p for p in enumerate_planar_pairings(m)}
    rows = {p: [] for p in planar.values()}
    for match in perfect_matchings(list(range(1, 2 * m + 1))):
        tau = Partition([list(pair) for pair in match], 2 * m)
        for sigma, c in _rule1(tau).items():
            if sigma in planar:
                rows[planar[sigma]].append((c, tuple(tuple(pair) for pair in match)))
    return rows


def sle2_weights(xs) -> dict[OddEvenPairing, float]:
    xs = _check_points(xs)
    m = len(xs) // 2
    L = lambda i, j: 1.0 / (xs[i - 1] - xs[j - 1]) ** 2
    out = {}
    for sigma, terms in _pairing_rows(m).items():
        total = 0.0
        for c, match in terms:
            prod = float(c)
            for i, j in match:
                prod *= L(i, j)
            total += prod
        out[sigma] = total
    return out


def sle2_probs(xs) -> SleDistribution:
    return _normalized(sle2_weights(xs))


# -- SLE4 --------------------------------------------------------------------

def sle4_weights(xs) -> dict[OddEvenPairing, float]:
    xs = _check_points(xs)
    X = lambda i, j: 1.0 / abs(xs[i - 1] - xs[j - 1])
    return dict(dd_probabilities(X, len(xs) // 2).weights)


def sle4_probs(xs) -> SleDistribution:
    return _normalized(sle4_weights(xs))


def cross_ratio(xs) -> float:
    x1, x2, x3, x4 = _check_points(xs)
    return (x4 - x3) * (x2 - x1) / ((x4 - x2) * (x3 - x1))


# -- SLE8 --------------------------------------------------------------------

def regular_polygon_points(sides: int, dps: int | None = None) -> list:
    """Prevertices on the real line of a regular polygon with the given
    number of vertices, via the Moebius map from the disk.  With ``dps``
    the points are mpf values at that precision."""
    if sides < 4 or sides % 2:
        raise DomainError("need an even number of sides, at least 4")
    if dps:
        import mpmath
        with mpmath.workdps(dps):
            return [-1 / mpmath.tan(mpmath.pi * (k + mpmath.mpf(1) / 2) / sides) for k in range(sides)]
    return [-1.0 / math.tan(math.pi * (k + 0.5) / sides) for k in range(sides)]


def _segment_float(xs, a, p, *, tol, max_order, use_numba):
    lo, hi = xs[a], xs[a + 1]
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    arr = np.asarray(xs)
    prev = None
    order = 32
    while order <= max_order:
        t, w = np.polynomial.legendre.leggauss(order)
        val = _accel.sc_segment_sum(t, w, mid, half, arr, p, a, a + 1, use_numba=use_numba)
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
        order *= 2
    raise NumericToleranceError(f"quadrature on [{lo}, {hi}] did not converge to {tol}")


def _segment_mp(xs, a, p, dps):
    import mpmath
    with mpmath.workdps(dps):
        X = [mpmath.mpf(x) for x in xs]
        lo, hi = X[a], X[a + 1]
        mid, half = (lo + hi) / 2, (hi - lo) / 2
        others = [x for k, x in enumerate(X) if k not in (a, a + 1)]

        def f(theta):
            w = mid + half * mpmath.sin(theta)
            den = mpmath.mpf(1)
            for x in others:
                den *= mpmath.sqrt(abs(w - x))
            return w ** p / den

        return mpmath.quad(f, [-mpmath.pi / 2, mpmath.pi / 2])


def _segment_increment(xs, a, p, **kw):
    """(real, imag) increment of g_p over [x_a, x_{a+1}] (0-based a)."""
    dps = kw.pop("dps", None)
    val = _segment_mp(xs, a, p, dps) if dps else _segment_float(xs, a, p, **kw)
    r = len(xs) - (a + 1)
    phase = (-(r + 1)) % 4  # i^{-(r+1)}
    return {0: (val, 0), 1: (0, val), 2: (-val, 0), 3: (0, -val)}[phase]


def sle8_response(xs, *, tol: float = 1e-13, max_order: int = 8192,
                  dps: int | None = None, use_numba: bool | None = None):
    """m x m response matrix (positive diagonal, rows summing to zero) of the
    interval nodes ``[x_{2k-1}, x_{2k}]``.

    ``dps`` switches the points, the quadrature and the linear solve to
    mpmath at that many decimal digits; the result is then a list of mpf
    rows.  Pass mpf points to get more than double accuracy.
    """
    if dps:
        import mpmath
        with mpmath.workdps(dps):
            return _sle8_response(xs, tol, max_order, dps, use_numba)
    return _sle8_response(xs, tol, max_order, dps, use_numba)


def _sle8_response(xs, tol, max_order, dps, use_numba):
    xs = _check_points(xs, dps=dps)
    m = len(xs) // 2
    if m < 2:
        raise DomainError("need at least four points")
    kw = dict(tol=tol, max_order=max_order, use_numba=use_numba, dps=dps)
    V = [[0] * m for _ in range(m)]
    I = [[0] * m for _ in range(m)]
    for p in range(m - 1):
        gap = [None] * len(xs)
        for a in range(1, 2 * m - 2, 2):  # gaps after x_2, x_4, ...
            gap[a] = _segment_increment(xs, a, p, **dict(kw))[1]
        acc = 0
        for k in range(m):
            if k > 0:
                acc = acc + gap[2 * k - 1]
            V[k][p] = acc
            I[k][p] = _segment_increment(xs, 2 * k, p, **dict(kw))[0]
    for k in range(m):
        V[k][m - 1] = 1
        I[k][m - 1] = 0
    if dps:
        import mpmath
        Lm = mpmath.matrix(I) * mpmath.inverse(mpmath.matrix(V))
        if Lm[0, 0] < 0:
            Lm = -Lm
        return [[(Lm[i, j] + Lm[j, i]) / 2 for j in range(m)] for i in range(m)]
    Lm = np.linalg.solve(np.asarray(V, dtype=float).T, np.asarray(I, dtype=float).T).T
    if Lm[0, 0] < 0:
        Lm = -Lm
    return ((Lm + Lm.T) / 2).tolist()


def sle8_weights(xs, **kw) -> dict[Partition, float]:
    lam = sle8_response(xs, **kw)
    m = len(lam)
    get = lambda i, j: -lam[i - 1][j - 1]
    return grove_probabilities(get, m)


def sle8_probs(xs, **kw) -> SleDistribution:
    raw = sle8_weights(xs, **kw)
    total = sum(raw.values())
    return SleDistribution({k: float(v / total) for k, v in sorted(raw.items())})


# -- GFF contour lines --------------------------------------------------------

def _balanced(S, N) -> set[int]:
    S = set(S)
    if any(s < 1 or s > N for s in S):
        raise DomainError("subset entries must be node labels 1..2n")
    odd = sum(1 for s in S if s % 2)
    if 2 * odd != len(S):
        raise DomainError("subset must be balanced (as many odd as even nodes)")
    return S


def _alpha(S, i, j) -> int:
    if (i in S) == (j in S):
        return 0
    return -1 if (i + j) % 2 == 0 else 1


def scaling_ds_product(xs, S: Iterable[int]) -> float:
    xs = _check_points(xs)
    S = _balanced(S, len(xs))
    out = 1.0
    for i in S:
        for j in range(1, len(xs) + 1):
            if j not in S:
                out *= abs(xs[j - 1] - xs[i - 1]) ** _alpha(S, i, j)
    return out


def scaling_ds_determinant(xs, S: Iterable[int]) -> float:
    """The same ratio by the determinant route with X = 1/|x_i - x_j|."""
    xs = _check_points(xs)
    S = _balanced(S, len(xs))
    X = lambda i, j: 1.0 / abs(xs[i - 1] - xs[j - 1])
    n = len(xs) // 2
    return d_s(X, S, n) / d_s(X, (), n)


def _dlog(xs, S, k) -> float:
    return sum(_alpha(S, k, l) / (xs[k - 1] - xs[l - 1])
               for l in range(1, len(xs) + 1) if l != k)


def _residual(xs, d1, d11, di) -> float:
    x1 = xs[0]
    N = len(xs)
    first = sum(di(i) / (xs[i - 1] - x1) for i in range(2, N + 1))
    drift = sum((-1) ** i / (xs[i - 1] - x1) for i in range(2, N + 1))
    return first + d1 * drift + d11 + d1 * d1


def gff_drift_residual(xs, S: Iterable[int], *, method: str = "analytic", h: float | None = None) -> float:
    """d_t M / (2M) for M = scaling_ds_product(xs, S) under SLE4 from x_1.

    ``method="finite-difference"`` differentiates log M numerically (fourth
    order stencils, step a fraction of the smallest gap) instead of using the
    closed-form exponents.
    """
    xs = _check_points(xs)
    S = _balanced(S, len(xs))
    if method == "analytic":
        d1 = _dlog(xs, S, 1)
        d11 = -sum(_alpha(S, 1, l) / (xs[0] - xs[l - 1]) ** 2 for l in range(2, len(xs) + 1))
        return _residual(xs, d1, d11, lambda i: _dlog(xs, S, i))
    if method == "finite-difference":
        if h is None:
            h = 1e-2 * min(b - a for a, b in zip(xs, xs[1:]))
        logM = lambda ys: math.log(scaling_ds_product(ys, S))

        def at(k, dx):
            ys = list(xs)
            ys[k - 1] += dx
            return logM(ys)

        def d(k):
            return (-at(k, 2 * h) + 8 * at(k, h) - 8 * at(k, -h) + at(k, -2 * h)) / (12 * h)

        d11 = (-at(1, 2 * h) + 16 * at(1, h) - 30 * logM(xs) + 16 * at(1, -h) - at(1, -2 * h)) / (12 * h * h)
        return _residual(xs, d(1), d11, d)
    raise ValueError(f"unknown method {method!r}")


__all__ = [
    "SleDistribution", "sle2_probs", "sle2_weights", "sle4_probs", "sle4_weights",
    "cross_ratio", "regular_polygon_points", "sle8_response", "sle8_weights", "sle8_probs",
    "scaling_ds_product", "scaling_ds_determinant", "gff_drift_residual", "balanced_subsets",
]
