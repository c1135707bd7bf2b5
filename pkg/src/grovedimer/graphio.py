"""Graph JSON files, generators and the bundled fixtures.

Schema::

    {"vertices": 5,
     "edges": [[u, v, "p/q"], ...],
     "nodes": [ids in counterclockwise order],
     "rotation": [[edge indices ccw around vertex 0], ...],   # optional
     "outer_face": [u, edge index],                         # optional dart
     "colors": [0 or 1 per vertex],                         # optional, 0 = black
     "coords": [[x, y], ...]}                               # optional
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .circuit import CircularPlanarGraph
from .errors import StructureError
from .exact import fraction_str, to_fraction


class SchemaError(StructureError):
    pass


def _need(data, key, kind):
    if key not in data:
        raise SchemaError(f"{key}: missing required field")
    value = data[key]
    if not isinstance(value, kind):
        raise SchemaError(f"{key}: expected {kind.__name__}")
    return value


def graph_from_dict(data: dict) -> CircularPlanarGraph:
    if not isinstance(data, dict):
        raise SchemaError("top level must be a JSON object")
    V = _need(data, "vertices", int)
    raw_edges = _need(data, "edges", list)
    edges = []
    for k, e in enumerate(raw_edges):
        if not isinstance(e, list) or len(e) not in (2, 3):
            raise SchemaError(f"edges[{k}]: expected [u, v] or [u, v, conductance]")
        u, v = e[0], e[1]
        if not isinstance(u, int) or not isinstance(v, int):
            raise SchemaError(f"edges[{k}]: endpoints must be integers")
        w = e[2] if len(e) == 3 else 1
        try:
            w = to_fraction(w)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"edges[{k}]: bad conductance {e[2]!r}") from exc
        edges.append((u, v, w))
    nodes = _need(data, "nodes", list)
    if any(not isinstance(x, int) for x in nodes):
        raise SchemaError("nodes: entries must be integers")
    rotation = data.get("rotation")
    if rotation is not None and (not isinstance(rotation, list)
                                 or any(not isinstance(r, list) for r in rotation)):
        raise SchemaError("rotation: expected a list of lists of edge indices")
    outer = data.get("outer_face")
    if outer is not None and (not isinstance(outer, list) or len(outer) != 2):
        raise SchemaError("outer_face: expected [vertex, edge index]")
    colors = data.get("colors")
    coords = data.get("coords")
    g = CircularPlanarGraph(
        V, tuple(edges), tuple(nodes),
        tuple(tuple(r) for r in rotation) if rotation is not None else None,
        tuple(outer) if outer is not None else None,
        tuple(colors) if colors is not None else None,
        tuple(tuple(c) for c in coords) if coords is not None else None,
    )
    if not g.is_connected():
        raise StructureError("edges: graph is disconnected")
    if g.rotation is not None:
        g.outer_face_index()  # checks the nodes sit on one face in ccw order
    return g


def graph_to_dict(g: CircularPlanarGraph) -> dict:
    out = {
        "vertices": g.num_vertices,
        "edges": [[u, v, fraction_str(w)] for u, v, w in g.edges],
        "nodes": list(g.nodes),
    }
    if g.rotation is not None:
        out["rotation"] = [list(r) for r in g.rotation]
    if g.outer_face is not None:
        out["outer_face"] = list(g.outer_face)
    if g.colors is not None:
        out["colors"] = list(g.colors)
    if g.coords is not None:
        out["coords"] = [list(c) for c in g.coords]
    return out


def parse_graph(path) -> CircularPlanarGraph:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    return graph_from_dict(data)


def dump_graph(g: CircularPlanarGraph) -> str:
    return json.dumps(graph_to_dict(g), indent=1, sort_keys=True)


def rotation_from_coords(num_vertices, edges, coords):
    rot = []
    for x in range(num_vertices):
        inc = []
        for k, (u, v, _) in enumerate(edges):
            if u == x or v == x:
                y = v if u == x else u
                ang = math.atan2(coords[y][1] - coords[x][1], coords[y][0] - coords[x][0])
                inc.append((ang, k))
        inc.sort()
        rot.append(tuple(k for _, k in inc))
    return tuple(rot)


def _boundary_ccw(rows, cols):
    pts = []
    for c in range(cols):
        pts.append((0, c))
    for r in range(1, rows):
        pts.append((r, cols - 1))
    if rows > 1:
        for c in range(cols - 2, -1, -1):
            pts.append((rows - 1, c))
    if cols > 1:
        for r in range(rows - 2, 0, -1):
            pts.append((r, 0))
    return pts


def grid_graph(rows: int, cols: int, nodes="corners", weights=None) -> CircularPlanarGraph:
    """Grid with vertex ``r*cols + c`` at (c, r); black where r+c is even.

    ``nodes`` is ``"corners"``, ``"boundary"`` or an explicit vertex list
    (which must be given counterclockwise).
    """
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise ValueError("grid needs at least two vertices")
    vid = lambda r, c: r * cols + c
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((vid(r, c), vid(r, c + 1), Fraction(1)))
            if r + 1 < rows:
                edges.append((vid(r, c), vid(r + 1, c), Fraction(1)))
    if weights is not None:
        edges = [(u, v, to_fraction(w)) for (u, v, _), w in zip(edges, weights)]
    coords = tuple((float(c), float(r)) for r in range(rows) for c in range(cols))
    if nodes == "corners":
        corners = [(0, 0), (0, cols - 1), (rows - 1, cols - 1), (rows - 1, 0)]
        seen = []
        for rc in corners:
            if vid(*rc) not in seen:
                seen.append(vid(*rc))
        node_ids = seen
    elif nodes == "boundary":
        node_ids = [vid(r, c) for r, c in _boundary_ccw(rows, cols)]
    else:
        node_ids = [int(x) for x in nodes]
    colors = tuple((r + c) % 2 for r in range(rows) for c in range(cols))
    rotation = rotation_from_coords(rows * cols, edges, coords)
    outer = None
    if rows == 1 or cols == 1:
        outer = (edges[0][0], 0)
    return CircularPlanarGraph(rows * cols, tuple(edges), tuple(node_ids), rotation, outer, colors, coords)


def cycle_graph(n: int, weights=None) -> CircularPlanarGraph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    edges = [(k, (k + 1) % n, Fraction(1)) for k in range(n)]
    if weights is not None:
        edges = [(u, v, to_fraction(w)) for (u, v, _), w in zip(edges, weights)]
    coords = tuple((math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n)) for k in range(n))
    rotation = rotation_from_coords(n, edges, coords)
    colors = tuple(k % 2 for k in range(n)) if n % 2 == 0 else None
    return CircularPlanarGraph(n, tuple(edges), tuple(range(n)), rotation, None, colors, coords)


def square_star_graph(weights=None) -> CircularPlanarGraph:
    """Four nodes on a square, one inner vertex joined to all of them, plus the
    boundary edges 1-2 and 3-4.  Two bounded faces, so the dual has two inner
    vertices."""
    coords = ((1.0, -1.0), (1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (0.0, 0.0))
    edges = [(4, 0, 1), (4, 1, 1), (4, 2, 1), (4, 3, 1), (0, 1, 1), (2, 3, 1)]
    if weights is not None:
        edges = [(u, v, w) for (u, v, _), w in zip(edges, weights)]
    edges = [(u, v, to_fraction(w)) for u, v, w in edges]
    rotation = rotation_from_coords(5, edges, coords)
    return CircularPlanarGraph(5, tuple(edges), (0, 1, 2, 3), rotation, None, None, coords)


def triangle_graph() -> CircularPlanarGraph:
    coords = ((1.0, 0.0), (-0.5, 0.866), (-0.5, -0.866))
    edges = [(0, 1, Fraction(1)), (1, 2, Fraction(1)), (2, 0, Fraction(1))]
    return CircularPlanarGraph(3, tuple(edges), (0, 1, 2), rotation_from_coords(3, edges, coords),
                               None, None, coords)


def k4_graph(weights=None) -> CircularPlanarGraph:
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    weights = weights or [1, 2, 3, 1, 2, 1]
    edges = [(u, v, to_fraction(w)) for (u, v), w in zip(pairs, weights)]
    return CircularPlanarGraph(4, tuple(edges), (0, 1, 2, 3))


def k5_minus_edge_graph(weights=None) -> CircularPlanarGraph:
    pairs = [(a, b) for a in range(5) for b in range(a + 1, 5) if (a, b) != (0, 2)]
    weights = weights or [1, 2, 1, 3, 1, 1, 2, 1, "1/2"]
    edges = [(u, v, to_fraction(w)) for (u, v), w in zip(pairs, weights)]
    return CircularPlanarGraph(5, tuple(edges), (0, 1, 2, 3))


FIXTURES = (
    "square_star", "triangle", "k4", "k5_minus_edge",
    "grid_2x2", "grid_2x3", "grid_2x4", "grid_3x3", "grid_3x4", "grid_4x4",
)


def build_fixture(name: str) -> CircularPlanarGraph:
    if name == "square_star":
        return square_star_graph([1, 2, "1/2", 3, 1, "3/2"])
    if name == "triangle":
        return triangle_graph()
    if name == "k4":
        return k4_graph()
    if name == "k5_minus_edge":
        return k5_minus_edge_graph()
    if name.startswith("grid_"):
        r, c = (int(x) for x in name[5:].split("x"))
        return grid_graph(r, c, "corners")
    raise KeyError(name)


def load_fixture(name: str) -> CircularPlanarGraph:
    ref = resources.files("grovedimer").joinpath("fixtures", f"{name}.json")
    return graph_from_dict(json.loads(ref.read_text()))


def fixture_names() -> list[str]:
    folder = resources.files("grovedimer").joinpath("fixtures")
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))
