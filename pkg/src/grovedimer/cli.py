"""Command-line front end.  Every command prints one JSON report."""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .circuit import resistances, response_matrix
from .combinatorics import crossing_count
from .dimers import (
    dd_probabilities,
    enumerate_double_dimers,
    kasteleyn,
    balanced_subsets,
    verify_bridge_identity,
    z_bw_wb,
)
from .errors import GroveDimerError, OracleSizeError
from .exact import fraction_str
from .graphio import (
    cycle_graph,
    dump_graph,
    fixture_names,
    grid_graph,
    load_fixture,
    parse_graph,
)
from .groves import (
    enumerate_groves,
    grove_probabilities,
    grove_probabilities_r,
    l_polynomials,
    normalize,
    r_polynomials,
    verify_general_graph_identity,
    verify_gluing,
)
from .meander import gram_2, gram_t
from .projection import projection_dd, projection_groves
from .sle import (
    gff_drift_residual,
    regular_polygon_points,
    sle2_probs,
    sle4_probs,
    sle8_probs,
    sle8_response,
)


class UsageError(Exception):
    pass


def _jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        return fraction_str(x)
    if isinstance(x, (int, float)):
        return x
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return str(x)


def _int_matrix(m: dict) -> dict:
    return {"rows": m["rows"], "cols": m["cols"], "entries": m["entries"]}


# -- commands ----------------------------------------------------------------

def _pretty_groves(P) -> dict:
    out = {}
    for i, sigma in enumerate(P.rows):
        terms = [(c, tau) for c, tau in zip(P.entries[i], P.cols) if c]
        out[str(sigma)] = _signed_sum((c, f"L[{tau}]") for c, tau in terms)
    return out


def _pretty_dd(P) -> dict:
    out = {}
    for i, sigma in enumerate(P.rows):
        terms = []
        for c, tau in zip(P.entries[i], P.cols):
            if c:
                sign = -1 if crossing_count(tau) % 2 else 1
                mono = "*".join(f"X{a},{b}" for a, b in tau.pairs())
                terms.append((c * sign, mono))
        out[str(sigma)] = _signed_sum(terms)
    return out


def _signed_sum(terms) -> str:
    text = ""
    for c, body in terms:
        mag = abs(c)
        piece = body if mag == 1 else f"{mag}*{body}"
        if not text:
            text = ("-" if c < 0 else "") + piece
        else:
            text += (" - " if c < 0 else " + ") + piece
    return text or "0"


def cmd_project(args):
    P = projection_groves(args.n) if args.kind == "groves" else projection_dd(args.n)
    res = _int_matrix(P.to_json())
    if args.pretty:
        res["polynomials"] = _pretty_groves(P) if args.kind == "groves" else _pretty_dd(P)
    return res, "exact"


def cmd_gram(args):
    builder = gram_t if args.kind == "t" else gram_2
    G = builder(args.n, extended=args.extended)
    res = G.to_json()
    if args.det:
        res["determinant"] = G.determinant()
    return res, "exact"


def cmd_groves(args):
    if args.action == "poly":
        polys = l_polynomials(args.n) if args.kind == "L" else r_polynomials(args.n)
        return {str(s): p.format() for s, p in polys.items()}, "exact"
    g = parse_graph(args.graph)
    lam = response_matrix(g)
    if args.action == "response":
        return {"response": lam.rows(), "resistance": resistances(lam).rows()}, "exact"
    vals = normalize(grove_probabilities(lam), args.normalize, g.n)
    res = {"probabilities": vals}
    if args.oracle:
        dist = enumerate_groves(g)
        truth = {s: w for s, w in dist.weights.items()}
        truth = normalize({s: truth.get(s, Fraction(0)) for s in vals}, args.normalize, g.n)
        res["oracle"] = truth
        res["oracle_match"] = truth == vals
    return res, "exact"


def cmd_dimers(args):
    g = parse_graph(args.graph)
    kd = kasteleyn(g)
    if args.action == "x":
        N = 2 * kd.n
        return {"Z": kd.Z, "X": [[kd.x(i, j) for j in range(2, N + 1, 2)] for i in range(1, N + 1, 2)]}, "exact"
    hat = dd_probabilities(kd)
    res = {"probabilities": hat.probabilities()}
    if args.oracle:
        orc = enumerate_double_dimers(g)
        truth = {s: orc.weight(s) / orc.total for s in hat.weights}
        res["oracle"] = truth
        res["oracle_match"] = truth == res["probabilities"]
    return res, "exact"


def _points(text):
    try:
        return [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"--points: {exc}") from exc


def cmd_sle(args):
    if args.kappa == "gff-check":
        if not args.points or args.subset is None:
            raise UsageError("gff-check needs --points and --subset")
        xs = _points(args.points)
        S = [int(s) for s in args.subset.split(",") if s.strip()]
        return {"residual": gff_drift_residual(xs, S)}, "float"
    if args.polygon:
        if args.kappa != "8":
            raise UsageError("--polygon is only supported for sle 8")
        kind, _, sides = args.polygon.partition(":")
        if kind != "regular" or not sides.isdigit():
            raise UsageError("--polygon expects regular:<sides>")
        xs = regular_polygon_points(int(sides))
    elif args.points:
        xs = _points(args.points)
    else:
        raise UsageError("give --points or --polygon")
    if args.kappa == "2":
        dist = sle2_probs(xs)
    elif args.kappa == "4":
        dist = sle4_probs(xs)
    else:
        dist = sle8_probs(xs)
        res = {"points": xs, "probabilities": dict(dist.probs), "response": sle8_response(xs)}
        return res, "float"
    return {"points": xs, "probabilities": dict(dist.probs)}, "float"


def cmd_gen(args):
    if args.family == "grid":
        nodes = args.nodes
        if nodes not in ("corners", "boundary"):
            nodes = [int(x) for x in nodes.split(",")]
        g = grid_graph(args.rows, args.cols, nodes)
    else:
        g = cycle_graph(args.n)
    text = dump_graph(g)
    if args.output:
        Path(args.output).write_text(text + "\n")
    return json.loads(text), "exact"


def verify_graph(name, g) -> dict:
    out = {}
    try:
        dist = enumerate_groves(g)
    except OracleSizeError as exc:
        out["groves"] = f"skipped: {exc}"
    else:
        lam = response_matrix(g)
        out["general_identity"] = verify_general_graph_identity(g)
        out["gluing"] = verify_gluing(g)
        if g.rotation is not None:
            vals = grove_probabilities(lam)
            unc = dist.uncrossing()
            out["groves_L"] = all(dist.Z(s) / unc == v for s, v in vals.items())
            tree = dist.tree()
            rvals = grove_probabilities_r(resistances(lam), g.n)
            out["groves_R"] = all(dist.Z(s) / tree == v for s, v in rvals.items())
    if g.rotation is None:
        out["dimers"] = "skipped: no rotation system"
        return out
    if g.n % 2:
        out["dimers"] = "skipped: odd number of nodes"
        return out
    try:
        kd = kasteleyn(g)
        orc = enumerate_double_dimers(g)
    except GroveDimerError as exc:
        out["dimers"] = f"skipped: {exc}"
        return out
    zbw, _ = z_bw_wb(g)
    hat = dd_probabilities(kd)
    out["dimers"] = (set(orc.weights) <= set(hat.weights)
                     and all(orc.weight(s) / zbw ** 2 == hat.weight(s) for s in hat.weights))
    out["bridge_identity"] = all(verify_bridge_identity(g, S, kd=kd, oracle=orc)
                                 for S in balanced_subsets(kd.n))
    return out


def cmd_verify(args):
    if args.all:
        graphs = [(name, load_fixture(name)) for name in fixture_names()]
    elif args.graph:
        graphs = [(args.graph, parse_graph(args.graph))]
    else:
        raise UsageError("give a graph file or --all")
    report = {name: verify_graph(name, g) for name, g in graphs}
    failed = [f"{name}:{k}" for name, r in report.items() for k, v in r.items() if v is False]
    return {"checks": report, "failed": failed, "ok": not failed}, "exact"


# -- driver ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="grovedimer", description="Grove and double-dimer connection probabilities.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--timing", action="store_true", help="include wall-clock time in the report")
    p.add_argument("--json", action="store_true", help="compact JSON report (the default)")
    p.add_argument("--pretty", action="store_true", help="indented JSON and polynomial listings")
    # the same flags are accepted after the subcommand too
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("project", parents=[common], help="projection matrices")
    sp.add_argument("kind", choices=["groves", "dd"])
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(func=cmd_project)

    sp = sub.add_parser("gram", parents=[common], help="meander Gram matrices")
    sp.add_argument("kind", choices=["t", "2"])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--extended", action="store_true")
    sp.add_argument("--det", action="store_true")
    sp.set_defaults(func=cmd_gram)

    sp = sub.add_parser("groves", parents=[common], help="grove probabilities")
    sp.add_argument("action", choices=["probs", "response", "poly"])
    sp.add_argument("graph", nargs="?")
    sp.add_argument("--normalize", choices=["tree", "uncrossing", "total"], default="total")
    sp.add_argument("--oracle", action="store_true")
    sp.add_argument("--n", type=int)
    sp.add_argument("--kind", choices=["L", "R"], default="L")
    sp.set_defaults(func=cmd_groves)

    sp = sub.add_parser("dimers", parents=[common], help="double-dimer pairing probabilities")
    sp.add_argument("action", choices=["probs", "x"])
    sp.add_argument("graph")
    sp.add_argument("--oracle", action="store_true")
    sp.set_defaults(func=cmd_dimers)

    sp = sub.add_parser("sle", parents=[common], help="scaling limits")
    sp.add_argument("kappa", choices=["2", "4", "8", "gff-check"])
    sp.add_argument("--points")
    sp.add_argument("--polygon")
    sp.add_argument("--subset")
    sp.set_defaults(func=cmd_sle)

    sp = sub.add_parser("gen", parents=[common], help="graph generators")
    gs = sp.add_subparsers(dest="family", required=True)
    g1 = gs.add_parser("grid", parents=[common])
    g1.add_argument("--rows", type=int, required=True)
    g1.add_argument("--cols", type=int, required=True)
    g1.add_argument("--nodes", default="corners")
    g1.add_argument("-o", "--output")
    g2 = gs.add_parser("cycle", parents=[common])
    g2.add_argument("--n", type=int, required=True)
    g2.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("verify", parents=[common], help="formula versus brute force on graphs")
    sp.add_argument("graph", nargs="?")
    sp.add_argument("--all", action="store_true")
    sp.set_defaults(func=cmd_verify)
    return p


def _digest(argv, args) -> str:
    h = hashlib.sha256("\0".join(argv).encode())
    graph = getattr(args, "graph", None)
    if graph and Path(graph).is_file():
        h.update(Path(graph).read_bytes())
    return h.hexdigest()


def run(argv: list[str]) -> tuple[int, str]:
    """Return (exit code, report text)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "groves" and args.action == "poly" and args.n is None:
        raise UsageError("groves poly needs --n")
    if args.command == "groves" and args.action != "poly" and not args.graph:
        raise UsageError(f"groves {args.action} needs a graph file")
    start = time.perf_counter()
    results, mode = args.func(args)
    report = {
        "command": list(argv),
        "input_digest": _digest(argv, args),
        "mode": mode,
        "results": _jsonable(results),
        "version": __version__,
    }
    if args.timing:
        report["seconds"] = round(time.perf_counter() - start, 6)
    text = json.dumps(report, indent=1 if args.pretty else None, sort_keys=True)
    code = 0
    if args.command == "verify" and not results["ok"]:
        code = 1
    return code, text


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        code, text = run(argv)
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"grovedimer: usage error: {exc}", file=sys.stderr)
        return 2
    except (GroveDimerError, ValueError, ZeroDivisionError, OSError) as exc:
        print(f"grovedimer: error: {exc}", file=sys.stderr)
        return 1
    print(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
