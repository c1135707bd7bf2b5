"""Dimer covers, Kasteleyn matrices and double-dimer pairing probabilities.

Colors: 0 is black, 1 is white.  After :func:`color_fixup` node ``k`` is
black exactly when ``k`` is odd.
"""
from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import exact
from .circuit import CircularPlanarGraph
from .combinatorics import (
    OddEvenPairing,
    crossing_count,
    enumerate_odd_even_pairings,
    enumerate_planar_pairings,
)
from .errors import NoPerfectMatchingError, OracleSizeError, StructureError
from .projection import projection_dd

BLACK, WHITE = 0, 1
ORACLE_VERTEX_LIMIT = 24


# -- coloring ----------------------------------------------------------------

def two_coloring(g: CircularPlanarGraph) -> tuple[int, ...]:
    """The given colors, or a BFS 2-coloring with node 1 black."""
    if g.colors is not None:
        colors = g.colors
    else:
        adj = [[] for _ in range(g.num_vertices)]
        for u, v, _ in g.edges:
            adj[u].append(v)
            adj[v].append(u)
        col = [-1] * g.num_vertices
        start = g.nodes[0]
        col[start] = BLACK
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if col[y] < 0:
                    col[y] = 1 - col[x]
                    queue.append(y)
        if any(c < 0 for c in col):
            raise StructureError("graph is disconnected")
        colors = tuple(col)
    for k, (u, v, _) in enumerate(g.edges):
        if colors[u] == colors[v]:
            raise StructureError(f"edges[{k}]: joins two vertices of the same color")
    return tuple(colors)


def _wanted_color(label: int) -> int:
    return BLACK if label % 2 == 1 else WHITE


def nodes_alternate(g: CircularPlanarGraph) -> bool:
    colors = two_coloring(g)
    return all(colors[v] == _wanted_color(k + 1) for k, v in enumerate(g.nodes))


def color_fixup(g: CircularPlanarGraph) -> CircularPlanarGraph:
    """Give every wrong-colored node a pendant vertex (edge weight 1) which
    takes over its node label."""
    if g.rotation is None:
        raise StructureError("color fixup needs a rotation system")
    if len(g.nodes) % 2:
        raise StructureError("nodes: double-dimer graphs need an even number of nodes")
    colors = list(two_coloring(g))
    faces = g.faces()
    walk = faces[g.outer_face_index(faces)]
    edges = list(g.edges)
    rotation = [list(r) for r in g.rotation]
    nodes = list(g.nodes)
    V = g.num_vertices
    for k, v in enumerate(g.nodes):
        if colors[v] == _wanted_color(k + 1):
            continue
        # outer wedge at v: between the dart leaving v and the dart arriving at v
        pos = [i for i, d in enumerate(walk) if g._dart_ends(d)[0] == v]
        if len(pos) != 1:
            raise StructureError(f"node {k + 1} touches the outer face more than once")
        out_edge = walk[pos[0]][0]
        new_edge = len(edges)
        edges.append((v, V, Fraction(1)))
        rot = rotation[v]
        rot.insert(rot.index(out_edge) + 1, new_edge)
        rotation.append([new_edge])
        colors.append(1 - colors[v])
        nodes[k] = V
        V += 1
    if V == g.num_vertices:
        return g if g.colors is not None else CircularPlanarGraph(
            g.num_vertices, g.edges, g.nodes, g.rotation, g.outer_face, tuple(colors), g.coords)
    outer = g.outer_face
    return CircularPlanarGraph(V, tuple(edges), tuple(nodes), tuple(tuple(r) for r in rotation),
                               outer, tuple(colors), None)


# -- Kasteleyn signs ---------------------------------------------------------

def _solve_gf2(rows: list[tuple[int, int]], num_vars: int, rng: random.Random | None):
    """rows are (bitmask, rhs).  Free variables are 0, or random if rng given."""
    pivots: list[tuple[int, int, int]] = []  # (pivot bit, mask, rhs)
    for mask, rhs in rows:
        for bit, pm, pr in pivots:
            if mask >> bit & 1:
                mask ^= pm
                rhs ^= pr
        if mask == 0:
            if rhs:
                raise StructureError("Kasteleyn sign system is inconsistent")
            continue
        bit = mask.bit_length() - 1
        # keep the basis reduced so back substitution is one pass
        new = []
        for b2, m2, r2 in pivots:
            if m2 >> bit & 1:
                m2 ^= mask
                r2 ^= rhs
            new.append((b2, m2, r2))
        pivots = new + [(bit, mask, rhs)]
    pivot_bits = {b for b, _, _ in pivots}
    x = [0] * num_vars
    for v in range(num_vars):
        if v not in pivot_bits and rng is not None:
            x[v] = rng.randrange(2)
    for bit, mask, rhs in pivots:
        acc = rhs
        m = mask & ~(1 << bit)
        while m:
            low = m & -m
            acc ^= x[low.bit_length() - 1]
            m ^= low
        x[bit] = acc
    return x


def kasteleyn_signs(g: CircularPlanarGraph, rng: random.Random | None = None) -> list[int]:
    """+1/-1 per edge so that every bounded face obeys the Kasteleyn rule."""
    faces = g.faces()
    outer = g.outer_face_index(faces)
    rows = []
    for k, walk in enumerate(faces):
        if k == outer:
            continue
        mask = 0
        for e, _ in walk:
            mask ^= 1 << e
        rhs = (len(walk) // 2 + 1) % 2
        rows.append((mask, rhs))
    x = _solve_gf2(rows, len(g.edges), rng)
    return [-1 if b else 1 for b in x]


def face_rule_holds(g: CircularPlanarGraph, signs: Sequence[int]) -> bool:
    faces = g.faces()
    outer = g.outer_face_index(faces)
    for k, walk in enumerate(faces):
        if k == outer:
            continue
        minus = sum(1 for e, _ in walk if signs[e] < 0)
        if len(walk) % 4 == 0 and minus % 2 == 0:
            return False
        if len(walk) % 4 == 2 and minus % 2 == 1:
            return False
    return True


# -- Kasteleyn data ----------------------------------------------------------

@dataclass(frozen=True)
class KasteleynData:
    graph: CircularPlanarGraph
    whites: tuple[int, ...]
    blacks: tuple[int, ...]
    signs: tuple[int, ...]
    K: tuple[tuple[Fraction, ...], ...]
    Z: Fraction
    X: Mapping[tuple[int, int], Fraction]

    @property
    def n(self) -> int:
        return len(self.graph.nodes) // 2

    def x(self, i: int, j: int) -> Fraction:
        if i % 2 == 0:
            i, j = j, i
        return self.X[(i, j)]

    def z_deleted(self, vertices: Iterable[int]) -> Fraction:
        gone = set(vertices)
        rows = [k for k, w in enumerate(self.whites) if w not in gone]
        cols = [k for k, b in enumerate(self.blacks) if b not in gone]
        if len(rows) != len(cols):
            return Fraction(0)
        if not rows:
            return Fraction(1)
        return abs(exact.det(exact.submatrix(self.K, rows, cols)))

    def z_d(self, S: Iterable[int]) -> Fraction:
        """Weighted dimer covers of the graph with the nodes in S removed."""
        return self.z_deleted(self.graph.nodes[i - 1] for i in S)


def kasteleyn(g: CircularPlanarGraph, rng: random.Random | None = None) -> KasteleynData:
    if g.rotation is None:
        raise StructureError("kasteleyn needs a rotation system")
    g = color_fixup(g)
    colors = g.colors
    whites = tuple(x for x in range(g.num_vertices) if colors[x] == WHITE)
    blacks = tuple(x for x in range(g.num_vertices) if colors[x] == BLACK)
    if len(whites) != len(blacks):
        raise NoPerfectMatchingError(f"{len(blacks)} black vs {len(whites)} white vertices")
    signs = kasteleyn_signs(g, rng)
    wi = {w: k for k, w in enumerate(whites)}
    bi = {b: k for k, b in enumerate(blacks)}
    K = [[Fraction(0)] * len(blacks) for _ in whites]
    for (u, v, w), s in zip(g.edges, signs):
        if colors[u] == WHITE:
            u, v = v, u
        K[wi[v]][bi[u]] += s * w
    Z = abs(exact.det(K)) if whites else Fraction(1)
    if Z == 0:
        raise NoPerfectMatchingError("graph has no dimer cover")
    partial = KasteleynData(g, whites, blacks, tuple(signs), tuple(tuple(r) for r in K), Z, {})
    X = {}
    N = len(g.nodes)
    for i in range(1, N + 1, 2):
        for j in range(2, N + 1, 2):
            X[(i, j)] = partial.z_d((i, j)) / Z
    return KasteleynData(g, whites, blacks, tuple(signs), partial.K, Z, X)


def x_by_definition(g: CircularPlanarGraph) -> dict[tuple[int, int], Fraction]:
    """X_{i,j} straight from the BW subgraphs of ``g`` in its own colors."""
    colors = two_coloring(g)
    label = g.node_label()
    def bw_keep(x, flip=()):
        if x not in label:
            return True
        k = label[x]
        keep = colors[x] == _wanted_color(k)
        return keep != (k in flip)
    signs = kasteleyn_signs(g)
    def z_of(flip):
        keep = [x for x in range(g.num_vertices) if bw_keep(x, flip)]
        return _dimer_det(g, colors, signs, keep)
    base = z_of(())
    N = len(g.nodes)
    return {(i, j): z_of((i, j)) / base for i in range(1, N + 1, 2) for j in range(2, N + 1, 2)}


def _dimer_det(g, colors, signs, keep) -> Fraction:
    keep = set(keep)
    whites = [x for x in sorted(keep) if colors[x] == WHITE]
    blacks = [x for x in sorted(keep) if colors[x] == BLACK]
    if len(whites) != len(blacks):
        return Fraction(0)
    if not whites:
        return Fraction(1)
    wi = {w: k for k, w in enumerate(whites)}
    bi = {b: k for k, b in enumerate(blacks)}
    K = [[Fraction(0)] * len(blacks) for _ in whites]
    for (u, v, w), s in zip(g.edges, signs):
        if u not in keep or v not in keep:
            continue
        if colors[u] == WHITE:
            u, v = v, u
        K[wi[v]][bi[u]] += s * w
    return abs(exact.det(K))


def z_bw_wb(g: CircularPlanarGraph) -> tuple[Fraction, Fraction]:
    """(Z^BW, Z^WB) of ``g`` in its own colors, by determinants."""
    colors = two_coloring(g)
    label = g.node_label()
    signs = kasteleyn_signs(g)
    bw = [x for x in range(g.num_vertices) if x not in label or colors[x] == _wanted_color(label[x])]
    wb = [x for x in range(g.num_vertices) if x not in label or colors[x] != _wanted_color(label[x])]
    return _dimer_det(g, colors, signs, bw), _dimer_det(g, colors, signs, wb)


# -- the determinant formula -------------------------------------------------

def _x_getter(X):
    if isinstance(X, KasteleynData):
        return X.x
    if callable(X):
        return X
    return lambda i, j: X[(i, j)] if (i, j) in X else X[(j, i)]


def _det_generic(m):
    if all(isinstance(v, (int, Fraction)) for r in m for v in r):
        return exact.det(m)
    import numpy as np
    return float(np.linalg.det(np.asarray(m, dtype=float))) if m else 1.0


def d_s(X, S: Iterable[int], n: int | None = None):
    """Signed n x n determinant equal to Z^D(S) Z^D(S^c) / (Z^D)^2."""
    if isinstance(X, KasteleynData):
        n = X.n
    if n is None:
        raise ValueError("n is required when X is not KasteleynData")
    S = set(S)
    odd_in = sum(1 for s in S if s % 2)
    if odd_in != len(S) - odd_in:
        raise ValueError("S must contain as many odd as even nodes")
    get = _x_getter(X)
    m = []
    for i in range(1, 2 * n, 2):
        row = []
        for j in range(2, 2 * n + 1, 2):
            if (i in S) == (j in S):
                sign = -1 if ((abs(i - j) - 1) // 2) % 2 else 1
                row.append(sign * get(i, j))
            else:
                row.append(0)
        m.append(row)
    return _det_generic(m)


def balanced_subsets(n: int) -> list[tuple[int, ...]]:
    odds = list(range(1, 2 * n, 2))
    evens = list(range(2, 2 * n + 1, 2))
    out = []
    for k in range(n + 1):
        for a in itertools.combinations(odds, k):
            for b in itertools.combinations(evens, k):
                out.append(tuple(sorted(a + b)))
    return sorted(out, key=lambda s: (len(s), s))


def bridges(pairing: OddEvenPairing, S) -> bool:
    S = set(S)
    return any((a in S) != (b in S) for a, b in pairing.pairs())


def bridging_matrix(n: int):
    rows = balanced_subsets(n)
    cols = enumerate_planar_pairings(n)
    return rows, cols, [[0 if bridges(p, S) else 1 for p in cols] for S in rows]


def x_prime(X, tau: OddEvenPairing):
    get = _x_getter(X)
    out = -1 if crossing_count(tau) % 2 else 1
    for a, b in tau.pairs():
        out = out * get(a, b)
    return out


@dataclass(frozen=True)
class DoubleDimerDistribution:
    n: int
    weights: Mapping[OddEvenPairing, object]

    def weight(self, sigma) -> object:
        if isinstance(sigma, str):
            sigma = OddEvenPairing.parse(sigma)
        return self.weights.get(sigma, 0)

    @property
    def total(self):
        return sum(self.weights.values())

    def probabilities(self) -> dict:
        t = self.total
        return {k: v / t for k, v in sorted(self.weights.items())}


def dd_probabilities(X, n: int | None = None) -> DoubleDimerDistribution:
    """hat-Pr for every planar pairing (Pr times Z^WB/Z^BW)."""
    if isinstance(X, KasteleynData):
        n = X.n
    if n is None:
        raise ValueError("n is required when X is not KasteleynData")
    P = projection_dd(n)
    xp = {tau: x_prime(X, tau) for tau in P.cols}
    out = {}
    for i, sigma in enumerate(P.rows):
        total = 0
        for j, tau in enumerate(P.cols):
            c = P.entries[i][j]
            if c:
                total = total + c * xp[tau]
        out[sigma] = total
    return DoubleDimerDistribution(n, out)


# -- brute force -------------------------------------------------------------

def dimer_covers(g: CircularPlanarGraph, keep: Iterable[int]):
    """Yield (edge index list, weight) for every perfect matching of the
    subgraph induced on ``keep``."""
    keep = sorted(set(keep))
    kset = set(keep)
    adj: dict[int, list[tuple[int, int]]] = {x: [] for x in keep}
    for k, (u, v, _) in enumerate(g.edges):
        if u in kset and v in kset:
            adj[u].append((v, k))
            adj[v].append((u, k))
    covered: set[int] = set()
    chosen: list[int] = []

    def rec(weight):
        free = next((x for x in keep if x not in covered), None)
        if free is None:
            yield list(chosen), weight
            return
        covered.add(free)
        for y, k in adj[free]:
            if y in covered:
                continue
            covered.add(y)
            chosen.append(k)
            yield from rec(weight * g.edges[k][2])
            chosen.pop()
            covered.discard(y)
        covered.discard(free)

    yield from rec(Fraction(1))


def enumerate_double_dimers(g: CircularPlanarGraph, *, limit: int = ORACLE_VERTEX_LIMIT) -> DoubleDimerDistribution:
    """Superpose every cover of G^BW with every cover of G^WB; the weight of
    each pairing class is Z^DD * Pr."""
    if g.num_vertices > limit:
        raise OracleSizeError(f"{g.num_vertices} vertices exceed the dimer oracle limit {limit}")
    if len(g.nodes) % 2:
        raise StructureError("nodes: need an even number of nodes")
    colors = two_coloring(g)
    label = g.node_label()
    in_bw = lambda x: x not in label or colors[x] == _wanted_color(label[x])
    in_wb = lambda x: x not in label or colors[x] != _wanted_color(label[x])
    bw = list(dimer_covers(g, [x for x in range(g.num_vertices) if in_bw(x)]))
    wb = list(dimer_covers(g, [x for x in range(g.num_vertices) if in_wb(x)]))
    n = len(g.nodes) // 2
    out: dict[OddEvenPairing, Fraction] = {}
    for m1, w1 in bw:
        mate1 = _mates(g, m1)
        for m2, w2 in wb:
            mate2 = _mates(g, m2)
            pairing = _trace_pairing(g, label, mate1, mate2)
            out[pairing] = out.get(pairing, Fraction(0)) + w1 * w2
    return DoubleDimerDistribution(n, out)


def _mates(g, matching):
    m = {}
    for k in matching:
        u, v, _ = g.edges[k]
        m[u] = v
        m[v] = u
    return m


def _trace_pairing(g, label, mate1, mate2) -> OddEvenPairing:
    pairs = []
    done = set()
    for start in g.nodes:
        if start in done:
            continue
        cur = mate1 if start in mate1 else mate2
        other = mate2 if cur is mate1 else mate1
        x = cur[start]
        while x not in label:
            cur, other = other, cur
            x = cur[x]
        done.add(start)
        done.add(x)
        pairs.append((label[start], label[x]))
    return OddEvenPairing.from_pairs(pairs)


def verify_bridge_identity(g: CircularPlanarGraph, S: Iterable[int], *,
                           kd: KasteleynData | None = None,
                           oracle: DoubleDimerDistribution | None = None) -> bool:
    S = tuple(S)
    kd = kd or kasteleyn(g)
    oracle = oracle or enumerate_double_dimers(g)
    N = len(g.nodes)
    Sc = tuple(i for i in range(1, N + 1) if i not in S)
    lhs = kd.z_d(S) * kd.z_d(Sc)
    rhs = sum((w for p, w in oracle.weights.items() if not bridges(p, S)), Fraction(0))
    return lhs == rhs
