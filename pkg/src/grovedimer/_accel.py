"""Hot loops with a numba path and a pure numpy path.

Set ``GROVEDIMER_NUMBA=0`` to force the numpy path (also used when numba
is not importable).  Both paths return identical arrays.
"""
from __future__ import annotations

import os

import numpy as np

_WANT = os.environ.get("GROVEDIMER_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

try:
    if not _WANT:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on the environment
    HAVE_NUMBA = False


def backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


# -- grove classification ----------------------------------------------------
#
# For every edge subset (bit mask) decide whether it is a grove: acyclic, and
# every component contains a node.  Groves are tagged with the set partition
# they induce on the nodes, packed as a restricted growth string in base n.

def _classify_numpy(us, vs, num_vertices, node_of, n, chunk=1 << 14):
    E = len(us)
    total = 1 << E
    node_vertices = np.flatnonzero(node_of >= 0)
    order = np.argsort(node_of[node_vertices])
    node_vertices = node_vertices[order]
    out_masks, out_codes = [], []
    for start in range(0, total, chunk):
        masks = np.arange(start, min(total, start + chunk), dtype=np.int64)
        M = len(masks)
        bits = ((masks[:, None] >> np.arange(E, dtype=np.int64)[None, :]) & 1).astype(bool)
        lab = np.tile(np.arange(num_vertices, dtype=np.int64), (M, 1))
        rows = np.arange(M)
        for _ in range(num_vertices):
            changed = False
            for e in range(E):
                sel = bits[:, e]
                a, b = lab[rows, us[e]], lab[rows, vs[e]]
                m = np.minimum(a, b)
                upd = sel & (m != np.maximum(a, b))
                if upd.any():
                    changed = True
                    lab[upd, us[e]] = m[upd]
                    lab[upd, vs[e]] = m[upd]
            if not changed:
                break
        comps = (lab == np.arange(num_vertices)[None, :]).sum(axis=1)
        acyclic = comps == num_vertices - bits.sum(axis=1)
        node_lab = lab[:, node_vertices]
        distinct = np.zeros(M, dtype=np.int64)
        code = np.zeros(M, dtype=np.int64)
        rgs = np.zeros((M, n), dtype=np.int64)
        for k in range(n):
            same = np.full(M, -1, dtype=np.int64)
            for j in range(k - 1, -1, -1):
                hit = node_lab[:, j] == node_lab[:, k]
                same = np.where(hit, rgs[:, j], same)
            fresh = same < 0
            rgs[:, k] = np.where(fresh, distinct, same)
            distinct = distinct + fresh
            code = code + rgs[:, k] * (n ** k)
        ok = acyclic & (distinct == comps)
        out_masks.append(masks[ok])
        out_codes.append(code[ok])
    return np.concatenate(out_masks), np.concatenate(out_codes)


if HAVE_NUMBA:

    @njit(cache=True)
    def _find(parent, x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    @njit(cache=True)
    def _classify_numba(us, vs, num_vertices, node_of, n):
        E = us.shape[0]
        total = 1 << E
        masks = np.empty(total, dtype=np.int64)
        codes = np.empty(total, dtype=np.int64)
        parent = np.empty(num_vertices, dtype=np.int64)
        has_node = np.empty(num_vertices, dtype=np.bool_)
        root_of_node = np.empty(n, dtype=np.int64)
        rgs = np.empty(n, dtype=np.int64)
        count = 0
        for mask in range(total):
            for x in range(num_vertices):
                parent[x] = x
            ok = True
            for e in range(E):
                if (mask >> e) & 1:
                    a = _find(parent, us[e])
                    b = _find(parent, vs[e])
                    if a == b:
                        ok = False
                        break
                    parent[a] = b
            if not ok:
                continue
            for x in range(num_vertices):
                has_node[x] = False
            for x in range(num_vertices):
                if node_of[x] >= 0:
                    r = _find(parent, x)
                    has_node[r] = True
                    root_of_node[node_of[x]] = r
            comps = 0
            for x in range(num_vertices):
                if parent[x] == x:
                    comps += 1
                    if not has_node[x]:
                        ok = False
            if not ok:
                continue
            distinct = 0
            code = 0
            power = 1
            for k in range(n):
                val = -1
                for j in range(k):
                    if root_of_node[j] == root_of_node[k]:
                        val = rgs[j]
                        break
                if val < 0:
                    val = distinct
                    distinct += 1
                rgs[k] = val
                code += val * power
                power *= n
            masks[count] = mask
            codes[count] = code
            count += 1
        return masks[:count], codes[:count]


def classify_groves(us, vs, num_vertices: int, node_of, n: int, *, use_numba: bool | None = None):
    """Return ``(masks, codes)`` for every grove of the graph.

    ``node_of[x]`` is the 0-based node label of vertex ``x`` or -1.
    """
    us = np.ascontiguousarray(us, dtype=np.int64)
    vs = np.ascontiguousarray(vs, dtype=np.int64)
    node_of = np.ascontiguousarray(node_of, dtype=np.int64)
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba and HAVE_NUMBA:
        return _classify_numba(us, vs, int(num_vertices), node_of, int(n))
    return _classify_numpy(us, vs, int(num_vertices), node_of, int(n))


def decode_rgs(code: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        out.append(code % n if n > 1 else 0)
        code = code // n if n > 1 else 0
    return out


# -- quadrature --------------------------------------------------------------
#
# Sum of f(theta_k) * w_k for the integrand of the Schwarz-Christoffel
# primitive after the substitution w = mid + half * sin(theta) on one segment.

def _sc_segment_numpy(nodes, weights, mid, half, xs, p, skip_lo, skip_hi):
    theta = nodes * (np.pi / 2)
    w = mid + half * np.sin(theta)
    prod = np.ones_like(w)
    for j, x in enumerate(xs):
        # the sin substitution cancels the two endpoint square roots
        if j == skip_lo or j == skip_hi:
            continue
        prod = prod * np.sqrt(np.abs(w - x))
    return float(np.sum(weights * (w ** p) * (np.pi / 2) / prod))


if HAVE_NUMBA:

    @njit(cache=True)
    def _sc_segment_numba(nodes, weights, mid, half, xs, p, skip_lo, skip_hi):
        total = 0.0
        for k in range(nodes.shape[0]):
            theta = nodes[k] * (np.pi / 2)
            w = mid + half * np.sin(theta)
            prod = 1.0
            for j in range(xs.shape[0]):
                if j == skip_lo or j == skip_hi:
                    continue
                prod *= np.sqrt(abs(w - xs[j]))
            total += weights[k] * (w ** p) * (np.pi / 2) / prod
        return total


def sc_segment_sum(nodes, weights, mid, half, xs, p, skip_lo, skip_hi, *, use_numba=None):
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba and HAVE_NUMBA:
        return float(_sc_segment_numba(nodes, weights, float(mid), float(half), xs, int(p),
                                       int(skip_lo), int(skip_hi)))
    return _sc_segment_numpy(nodes, weights, float(mid), float(half), xs, int(p),
                             int(skip_lo), int(skip_hi))
