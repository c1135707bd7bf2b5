"""Weighted graphs with boundary nodes and their electrical data.

Vertices are integers ``0..V-1``.  ``nodes[k]`` is the vertex carrying
node label ``k+1``; nodes are listed counterclockwise around the outer
face.  An optional rotation system (counterclockwise list of incident
edge indices at every vertex) gives the planar embedding.

Face walks keep the face on the left: after arriving at ``y`` along edge
``e`` the walk leaves along the edge preceding ``e`` in the rotation at
``y``.  Bounded faces are therefore traced counterclockwise and the outer
face clockwise, so the outer walk meets the nodes in decreasing order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import exact
from .combinatorics import Partition
from .errors import EmbeddingRequiredError, StructureError

Dart = tuple[int, int]  # (edge index, 0 for u->v or 1 for v->u)


@dataclass(frozen=True)
class CircularPlanarGraph:
    num_vertices: int
    edges: tuple[tuple[int, int, Fraction], ...]
    nodes: tuple[int, ...]
    rotation: tuple[tuple[int, ...], ...] | None = None
    outer_face: Dart | None = None
    colors: tuple[int, ...] | None = None  # 0 black, 1 white
    coords: tuple[tuple[float, float], ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        edges = tuple((int(u), int(v), exact.to_fraction(w)) for u, v, w in self.edges)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "nodes", tuple(int(x) for x in self.nodes))
        if self.rotation is not None:
            object.__setattr__(self, "rotation", tuple(tuple(int(e) for e in r) for r in self.rotation))
        if self.outer_face is not None:
            object.__setattr__(self, "outer_face", (int(self.outer_face[0]), int(self.outer_face[1])))
        if self.colors is not None:
            object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        self._validate()

    # -- validation ----------------------------------------------------------

    def _validate(self):
        V = self.num_vertices
        if V < 1:
            raise StructureError("vertices: need at least one vertex")
        for k, (u, v, w) in enumerate(self.edges):
            if not (0 <= u < V and 0 <= v < V):
                raise StructureError(f"edges[{k}]: endpoint out of range")
            if u == v:
                raise StructureError(f"edges[{k}]: self-loops are not allowed")
            if w <= 0:
                raise StructureError(f"edges[{k}]: conductance must be positive, got {w}")
        if not self.nodes:
            raise StructureError("nodes: must be nonempty")
        if len(set(self.nodes)) != len(self.nodes):
            raise StructureError("nodes: repeated vertex")
        if any(not 0 <= x < V for x in self.nodes):
            raise StructureError("nodes: vertex out of range")
        if self.colors is not None:
            if len(self.colors) != V or any(c not in (0, 1) for c in self.colors):
                raise StructureError("colors: need one 0/1 entry per vertex")
        if self.rotation is not None:
            if len(self.rotation) != V:
                raise StructureError("rotation: need one cyclic list per vertex")
            inc = self.incidence()
            for x in range(V):
                if sorted(self.rotation[x]) != sorted(inc[x]):
                    raise StructureError(f"rotation[{x}]: must list exactly the incident edges of vertex {x}")

    # -- basic structure -----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.nodes)

    def incidence(self) -> list[list[int]]:
        inc: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for k, (u, v, _) in enumerate(self.edges):
            inc[u].append(k)
            inc[v].append(k)
        return inc

    def is_connected(self) -> bool:
        adj = [[] for _ in range(self.num_vertices)]
        for u, v, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.num_vertices

    def inner_vertices(self) -> list[int]:
        ns = set(self.nodes)
        return [x for x in range(self.num_vertices) if x not in ns]

    def node_label(self) -> dict[int, int]:
        return {v: k + 1 for k, v in enumerate(self.nodes)}

    def with_weights(self, weights: Sequence) -> "CircularPlanarGraph":
        edges = tuple((u, v, w) for (u, v, _), w in zip(self.edges, weights))
        return CircularPlanarGraph(self.num_vertices, edges, self.nodes, self.rotation,
                                   self.outer_face, self.colors, self.coords)

    def scaled(self, c) -> "CircularPlanarGraph":
        c = exact.to_fraction(c)
        return self.with_weights([w * c for _, _, w in self.edges])

    # -- embedding -----------------------------------------------------------

    def _require_embedding(self):
        if self.rotation is None:
            raise EmbeddingRequiredError("this operation needs a rotation system")

    def _dart_ends(self, d: Dart) -> tuple[int, int]:
        u, v, _ = self.edges[d[0]]
        return (u, v) if d[1] == 0 else (v, u)

    def next_dart(self, d: Dart) -> Dart:
        _, y = self._dart_ends(d)
        rot = self.rotation[y]
        e = d[0]
        # a multi-edge appears once per endpoint so index() is unambiguous
        k = rot.index(e)
        e2 = rot[(k - 1) % len(rot)]
        u2, _, _ = self.edges[e2]
        return (e2, 0 if u2 == y else 1)

    def faces(self) -> list[list[Dart]]:
        """All face walks, each as the cyclic list of darts with the face on the left."""
        self._require_embedding()
        seen: set[Dart] = set()
        out = []
        for e in range(len(self.edges)):
            for s in (0, 1):
                d = (e, s)
                if d in seen:
                    continue
                walk = []
                while d not in seen:
                    seen.add(d)
                    walk.append(d)
                    d = self.next_dart(d)
                out.append(walk)
        V, E = self.num_vertices, len(self.edges)
        if E and V - E + len(out) != 2:
            raise StructureError("rotation: the rotation system is not a planar embedding of a connected graph")
        return out

    def face_vertices(self, walk: list[Dart]) -> list[int]:
        return [self._dart_ends(d)[0] for d in walk]

    def outer_face_index(self, faces: list[list[Dart]] | None = None) -> int:
        faces = self.faces() if faces is None else faces
        if self.outer_face is not None:
            u, e = self.outer_face
            eu, ev, _ = self.edges[e]
            d = (e, 0 if eu == u else 1)
            for k, w in enumerate(faces):
                if d in w:
                    return k
            raise StructureError("outer_face: dart not found")
        if not self.edges:
            raise StructureError("graph has no edges")
        label = self.node_label()
        n = self.n
        candidates = []
        for k, walk in enumerate(faces):
            seq = []
            for x in self.face_vertices(walk):
                if x in label and label[x] not in seq:
                    seq.append(label[x])
            if len(seq) != n:
                continue
            i0 = seq.index(n)
            rolled = seq[i0:] + seq[:i0]
            if rolled == list(range(n, 0, -1)):
                candidates.append(k)
        if not candidates:
            raise StructureError("nodes: no face visits every node in counterclockwise order")
        if len(candidates) > 1:
            if n >= 3:
                raise StructureError("outer face is ambiguous; give outer_face explicitly")
            lengths = [len(faces[k]) for k in candidates]
            best = max(lengths)
            if lengths.count(best) > 1:
                raise StructureError("outer face is ambiguous; give outer_face explicitly")
            return candidates[lengths.index(best)]
        return candidates[0]


# -- matrices ----------------------------------------------------------------

@dataclass(frozen=True)
class ResponseMatrix:
    entries: tuple[tuple, ...]

    @classmethod
    def from_rows(cls, rows) -> "ResponseMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def n(self) -> int:
        return len(self.entries)

    def L(self, i: int, j: int):
        """Current response between nodes i and j (1-based), the negated off-diagonal entry."""
        if i == j:
            raise ValueError("L is defined for distinct nodes")
        return -self.entries[i - 1][j - 1]

    def reduced(self) -> list[list]:
        """The matrix with the last node's row and column removed."""
        m = self.n - 1
        return [list(self.entries[i][:m]) for i in range(m)]

    def rows(self) -> list[list]:
        return [list(r) for r in self.entries]

    def is_exact(self) -> bool:
        return all(isinstance(x, (Fraction, int)) for r in self.entries for x in r)


@dataclass(frozen=True)
class ResistanceMatrix:
    entries: tuple[tuple, ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def R(self, i: int, j: int):
        return self.entries[i - 1][j - 1]

    def rows(self) -> list[list]:
        return [list(r) for r in self.entries]


def laplacian(g: CircularPlanarGraph) -> list[list[Fraction]]:
    V = g.num_vertices
    m = [[Fraction(0)] * V for _ in range(V)]
    for u, v, w in g.edges:
        m[u][u] += w
        m[v][v] += w
        m[u][v] -= w
        m[v][u] -= w
    return m


def kron_reduce(matrix: list[list], keep: Sequence[int]) -> list[list]:
    """Schur complement onto the ``keep`` indices by eliminating the rest one at a time."""
    size = len(matrix)
    keep = list(keep)
    keep_set = set(keep)
    m = [list(r) for r in matrix]
    alive = set(range(size))
    for v in range(size):
        if v in keep_set:
            continue
        piv = m[v][v]
        if piv == 0:
            raise StructureError("interior block is singular (a part of the graph does not reach any node)")
        nbrs = [x for x in alive if x != v and m[v][x] != 0]
        for a in nbrs:
            f = m[a][v] / piv
            if f == 0:
                continue
            for b in nbrs:
                m[a][b] -= f * m[v][b]
        alive.discard(v)
        for x in alive:
            m[x][v] = 0
            m[v][x] = 0
    return [[m[a][b] for b in keep] for a in keep]


def response_matrix(g: CircularPlanarGraph) -> ResponseMatrix:
    if not g.is_connected():
        raise StructureError("graph is disconnected")
    lap = laplacian(g)
    reduced = kron_reduce(lap, g.nodes)
    return ResponseMatrix.from_rows(reduced)


def resistances(lam: ResponseMatrix) -> ResistanceMatrix:
    n = lam.n
    if n == 1:
        return ResistanceMatrix(((Fraction(0),),))
    inv = exact.inverse(lam.reduced())
    def g(i, j):
        return inv[i - 1][j - 1] if i < n and j < n else Fraction(0)
    rows = []
    for i in range(1, n + 1):
        rows.append(tuple(g(i, i) + g(j, j) - 2 * g(i, j) for j in range(1, n + 1)))
    return ResistanceMatrix(tuple(rows))


def reduced_inverse_from_resistances(R: ResistanceMatrix) -> list[list[Fraction]]:
    n = R.n
    return [[(R.R(i, n) + R.R(j, n) - R.R(i, j)) / 2 for j in range(1, n)] for i in range(1, n)]


def response_from_resistances(R: ResistanceMatrix) -> ResponseMatrix:
    n = R.n
    red = exact.inverse(reduced_inverse_from_resistances(R))
    rows = [list(r) + [-sum(r)] for r in red]
    last = [-sum(rows[i][j] for i in range(n - 1)) for j in range(n)]
    rows.append(last)
    return ResponseMatrix.from_rows(rows)


def quotient_graph(g: CircularPlanarGraph, sigma: Partition) -> CircularPlanarGraph:
    """Glue the nodes in each part of ``sigma``; node k of the result is part k."""
    if sigma.n != g.n:
        raise ValueError("partition size does not match the node count")
    rep = {}
    for part in sigma.parts:
        anchor = g.nodes[part[0] - 1]
        for item in part:
            rep[g.nodes[item - 1]] = anchor
    old = [rep.get(x, x) for x in range(g.num_vertices)]
    keep = sorted(set(old))
    index = {x: k for k, x in enumerate(keep)}
    edges = []
    for u, v, w in g.edges:
        a, b = index[old[u]], index[old[v]]
        if a != b:
            edges.append((a, b, w))
    nodes = [index[g.nodes[part[0] - 1]] for part in sigma.parts]
    return CircularPlanarGraph(len(keep), tuple(edges), tuple(nodes))


def gluing_matrix(sigma: Partition) -> list[list[int]]:
    return [[int(i in part) for i in range(1, sigma.n + 1)] for part in sigma.parts]


def spanning_tree_weight(g: CircularPlanarGraph) -> Fraction:
    if g.num_vertices == 1:
        return Fraction(1)
    lap = laplacian(g)
    return exact.det([row[1:] for row in lap[1:]])


def dual_graph(g: CircularPlanarGraph) -> CircularPlanarGraph:
    """Planar dual with the outer face split into n dual nodes.

    Dual node i sits on the outer boundary between primal nodes i and i+1;
    dual conductances are reciprocals.  Self-loops are dropped.
    """
    g._require_embedding()
    faces = g.faces()
    outer = g.outer_face_index(faces)
    label = g.node_label()
    n = g.n
    walk = faces[outer]
    verts = g.face_vertices(walk)
    hits = [k for k, x in enumerate(verts) if x in label]
    for x in g.nodes:
        if verts.count(x) != 1:
            raise StructureError("dual graph needs every node to appear exactly once on the outer face")
    # darts starting at node i+1 up to the arrival at node i belong to dual node i
    dual_node_of: dict[Dart, int] = {}
    for idx, start in enumerate(hits):
        end = hits[(idx + 1) % len(hits)]
        i = label[verts[start]] - 1
        if i == 0:
            i = n
        k = start
        while True:
            dual_node_of[walk[k]] = i
            k = (k + 1) % len(walk)
            if k == end:
                break
    inner_faces = [k for k in range(len(faces)) if k != outer]
    # dual vertex ids: dual nodes 1..n are 0..n-1, then bounded faces
    face_vertex = {f: n + t for t, f in enumerate(inner_faces)}
    dart_face = {}
    for f, w in enumerate(faces):
        for d in w:
            dart_face[d] = f
    def side(d):
        f = dart_face[d]
        if f == outer:
            return dual_node_of[d] - 1
        return face_vertex[f]
    edges = []
    for e, (_, _, w) in enumerate(g.edges):
        a, b = side((e, 0)), side((e, 1))
        if a != b:
            edges.append((a, b, 1 / w))
    return CircularPlanarGraph(n + len(inner_faces), tuple(edges), tuple(range(n)))


def complete_graph_from_response(lam: ResponseMatrix) -> CircularPlanarGraph:
    n = lam.n
    edges = [(i - 1, j - 1, lam.L(i, j)) for i in range(1, n + 1) for j in range(i + 1, n + 1)
             if lam.L(i, j) != 0]
    return CircularPlanarGraph(n, tuple(edges), tuple(range(n)))


# -- forest polynomials ------------------------------------------------------

def _det_any(m: list[list]):
    if not m:
        return 1
    if all(isinstance(x, (int, Fraction)) for r in m for x in r):
        return exact.det(m)
    return float(np.linalg.det(np.asarray(m, dtype=float)))


def _entry(lam, i, j):
    if isinstance(lam, ResponseMatrix):
        return lam.L(i, j)
    if callable(lam):
        return lam(i, j)
    return -lam[i - 1][j - 1]


def part_tree_weight(part: Sequence[int], lam):
    """Weighted spanning-tree sum of the complete graph on ``part`` with weights L."""
    k = len(part)
    if k == 1:
        return 1
    lap = [[0] * k for _ in range(k)]
    for a in range(k):
        for b in range(a + 1, k):
            w = _entry(lam, part[a], part[b])
            lap[a][b] -= w
            lap[b][a] -= w
            lap[a][a] += w
            lap[b][b] += w
    return _det_any([row[1:] for row in lap[1:]])


def l_tau(tau: Partition, lam):
    """Product over parts of the matrix-tree sums; ``lam`` may be a ResponseMatrix,
    a square matrix (entries are negated to read L) or a callable ``L(i, j)``."""
    out = 1
    for part in tau.parts:
        if len(part) > 1:
            out = out * part_tree_weight(part, lam)
    return out
