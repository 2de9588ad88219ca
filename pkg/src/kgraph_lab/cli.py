"""kgraph-lab: command-line front end.

Exit status is 0 when an analysis ran (whatever its mathematical verdict),
1 for unreadable or invalid input, and 2 for an internal defect.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from importlib import resources
from typing import Any

from . import __version__
from .alignment import (
    common_extensions,
    find_finite_exhaustive,
    is_exhaustive,
    is_finitely_aligned,
    is_locally_convex,
    lambda_min,
    row_finite_report,
)
from .ckspan import closure_of, parse_generator, verify_span_closed
from .closure import (
    essential_subgraph,
    is_full_corner,
    morita_corners,
    saturation,
    simplicity_decision,
    stranded_vertices,
)
from .constructions import (
    Cocycle,
    GroupSpec,
    check_pairwise_min_empty,
    dual_graph,
    is_saturated_morphism,
    skew_product,
    validate_morphism,
)
from .core import KGraph, check_kgraph, enumerate_paths, normalize, paths_upto, reorder, sort_paths
from .errors import KGraphError, ParseError, ValidationError
from .fixtures import FIXTURES, describe_fixture
from .parsing import (
    dump_graph,
    load_graph,
    parse_degree,
    parse_group_cocycle,
    parse_group_spec,
    parse_morphism,
    parse_vertex_list,
    parse_window,
    read_text,
    vertex_ids,
)
from .verdicts import TriState, _plain

SEED_ENV = "KGRAPH_LAB_SEED"


class InternalDefect(Exception):
    """An invariant that a correct implementation always satisfies was broken."""


# ---------------------------------------------------------------------------
# report assembly


class Report:
    def __init__(self, command: str, g: KGraph | None, args: dict, seed: int | None):
        self.command = command
        self.graph = g.name if g is not None else None
        self.boundary = g is not None and g.truncation is not None
        self.args = args
        self.seed = seed
        self.results: dict[str, Any] = {}
        self.provenance: list[dict] = []
        self.text: list[str] = []

    def claim(self, claim: str, basis: str, verdict: Any = None, bounds: dict | None = None,
              complete: bool = True, premises: list[str] | None = None) -> None:
        entry = {
            "claim": claim,
            "verdict": None if verdict is None else str(verdict),
            "basis": basis,
            "bounds": bounds or {},
            "complete": bool(complete),
            "boundary": self.boundary,
        }
        if premises is not None:
            entry["premises"] = premises
        self.provenance.append(entry)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "version": __version__,
            "seed": self.seed,
            "graph": self.graph,
            "arguments": self.args,
            "results": _plain(self.results),
            "provenance": self.provenance,
            "complete": all(p["complete"] for p in self.provenance),
        }


def load_schema() -> dict:
    return json.loads(resources.files("kgraph_lab").joinpath("report_schema.json").read_text(encoding="utf-8"))


def render_json(report: Report) -> str:
    return json.dumps(report.to_json(), sort_keys=True, indent=2, ensure_ascii=False)


def render_text(report: Report) -> str:
    lines = [f"{report.command}: {report.graph or ''}".rstrip()]
    lines += report.text
    for p in report.provenance:
        flags = [] if p["complete"] else ["incomplete"]
        if p["boundary"]:
            flags.append("windowed")
        tag = f" [{', '.join(flags)}]" if flags else ""
        verdict = f" = {p['verdict']}" if p["verdict"] is not None else ""
        lines.append(f"  {p['claim']}{verdict}{tag}  ({p['basis']}; bounds {p['bounds']})")
    return "\n".join(lines)


def _verdict(t: TriState) -> str:
    return t.value.value


# ---------------------------------------------------------------------------
# input helpers


def resolve_graph(spec: str) -> KGraph:
    if spec.startswith("fixture:"):
        name = spec[len("fixture:"):]
        if name not in FIXTURES:
            raise ParseError(f"unknown fixture {name!r}", "--graph")
        g = FIXTURES[name]()
    else:
        g = load_graph(spec)
    report = check_kgraph(g)
    if not report.ok:
        raise ValidationError(report)
    return g


def _seed() -> int | None:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"{SEED_ENV} must be an integer, got {raw!r}", "environment") from None


def _paths_arg(g: KGraph, text: str):
    from .core import split_top

    return sort_paths({g.parse_path(t) for t in split_top(text, ",") if t.strip()})


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(g: KGraph, a, rep: Report) -> int:
    report = check_kgraph(g)
    rng = random.Random(rep.seed if rep.seed is not None else 0)
    # spot-check confluence: scramble normal forms and rewrite in random order
    checked = mismatches = 0
    if report.ok:
        for v in g.vertices:
            for p in paths_upto(g, v, (2,) * g.rank):
                if len(p.edges) < 2:
                    continue
                word = [g.color(e) for e in p.edges]
                rng.shuffle(word)
                scrambled = reorder(g, list(p.edges), word)
                checked += 1
                if tuple(normalize(g, scrambled, rng)) != p.edges:
                    mismatches += 1
    rep.results = {
        "ok": report.ok,
        "violations": [str(x) for x in report.violations],
        "rewrite_checks": checked,
        "rewrite_mismatches": mismatches,
    }
    rep.claim("valid k-graph presentation", "incidence, square uniqueness, completeness and cube checks",
              "yes" if report.ok else "no")
    rep.text += [f"  {x}" for x in report.violations] or ["  ok"]
    if mismatches:
        raise InternalDefect(f"{mismatches} random rewrite orders disagreed with the normal form")
    return 0 if report.ok else 1


def cmd_paths(g: KGraph, a, rep: Report) -> int:
    v = vertex_ids(g, [a.vertex])[0]
    if a.degree:
        n = parse_degree(a.degree, g.rank)
        found = sort_paths(enumerate_paths(g, v, n))
        bound = {"degree": list(n)}
    else:
        n = parse_degree(a.max_degree, g.rank)
        found = sorted(paths_upto(g, v, n), key=lambda p: (sum(p.degree), p.literal))
        bound = {"max_degree": list(n)}
    rep.results = {"vertex": v, "paths": [p.literal for p in found], "count": len(found)}
    rep.claim(f"paths at {v}", "enumeration of normal forms", None, bound)
    rep.text.append("  " + ", ".join(p.literal for p in found))
    return 0


def cmd_lambda_min(g: KGraph, a, rep: Report) -> int:
    lam, mu = g.parse_path(a.lam), g.parse_path(a.mu)
    pairs = lambda_min(g, lam, mu)
    rep.results = {"lambda": lam.literal, "mu": mu.literal, "lambda_min": [p.literal for p in pairs]}
    if a.degree:
        n = parse_degree(a.degree, g.rank)
        rep.results["common_extensions"] = [p.literal for p in common_extensions(g, lam, mu, n)]
    rep.claim(f"Λ^min({lam},{mu})", "minimal common extensions by factorisation", None,
              complete=not rep.boundary)
    rep.text.append(f"  Λ^min = {{{', '.join(p.literal for p in pairs)}}}")
    return 0


def cmd_exhaustive(g: KGraph, a, rep: Report) -> int:
    v = vertex_ids(g, [a.vertex])[0]
    probe = parse_degree(a.max_degree, g.rank) if a.max_degree else None
    bounds = {"probe": list(probe) if probe else "default"}
    if a.e:
        E = _paths_arg(g, a.e)
        t = is_exhaustive(g, E, v, probe)
        rep.results = {"vertex": v, "E": [p.literal for p in E], "exhaustive": t.to_json()}
        rep.claim(f"E exhaustive at {v}", "every probed path meets E", _verdict(t), bounds)
    else:
        target = parse_vertex_list(a.target) if a.target else None
        E = find_finite_exhaustive(g, v, target, a.n_max, probe)
        rep.results = {"vertex": v, "found": None if E is None else [p.literal for p in E]}
        bounds["n_max"] = a.n_max
        rep.claim(f"finite exhaustive set at {v}", "search over vΛ^{≤(n..n)}", "yes" if E else "unknown", bounds,
                  complete=E is not None)
    rep.text.append(f"  {rep.results}")
    return 0


def cmd_saturate(g: KGraph, a, rep: Report) -> int:
    V = vertex_ids(g, parse_vertex_list(a.set))
    res = saturation(g, V, a.n_max)
    rep.results = {
        "set": sorted(V),
        "hereditary": sorted(res.hereditary_stage),
        "closure": sorted(res.closure),
        "rounds": res.rounds,
        "complete": res.complete,
        "undecided": sorted(res.undecided),
        "exhaustive_sets": {v: [p.literal for p in E] for v, E in sorted(res.exhaustive_sets.items())},
    }
    rep.claim("Σ(V)", "alternate hereditary closure with finite exhaustive absorption", None,
              {"n_max": a.n_max}, res.complete)
    rep.text.append(f"  Σ(V) = {{{', '.join(sorted(res.closure))}}}  complete={str(res.complete).lower()}")
    return 0


def cmd_essential(g: KGraph, a, rep: Report) -> int:
    aware = not a.literal
    st = stranded_vertices(g, window_aware=aware)
    ess = essential_subgraph(g, window_aware=aware)
    rep.results = {
        "stranded": sorted(st.stranded),
        "essential_vertices": sorted(st.essential_vertices),
        "direct_probe": sorted(st.direct),
        "disagreements": sorted(st.disagreements),
        "stages": [sorted(s) for s in st.stages],
        "essential_graph": dump_graph(ess).splitlines(),
        "window_aware": aware,
    }
    mode = "cut edges count as exits" if aware else "cut edges ignored"
    rep.claim("stranded vertices", f"fixed point of the removal recursion, checked against a direct probe; {mode}",
              None, {"probe": len(g.vertices) * g.rank}, not st.disagreements)
    rep.text.append(f"  stranded = {{{', '.join(sorted(st.stranded))}}}")
    if st.disagreements:
        raise InternalDefect(f"stranded recursion and direct probe disagree on {sorted(st.disagreements)}")
    return 0


def cmd_corner_report(g: KGraph, a, rep: Report) -> int:
    X = vertex_ids(g, parse_vertex_list(a.x))
    bounds = {"n_max": a.n_max, "p_bound": a.p_bound}
    full = is_full_corner(g, X, a.n_max)
    res = saturation(g, X, a.n_max)
    rep.claim("corner at X is full", "full exactly when Σ(X) is every vertex", _verdict(full),
              {"n_max": a.n_max}, res.complete)
    results: dict[str, Any] = {"X": sorted(X), "saturation": sorted(res.closure), "full": full.to_json()}
    if a.y:
        Y = vertex_ids(g, parse_vertex_list(a.y))
        mor = morita_corners(g, X, Y, a.n_max)
        results["Y"] = sorted(Y)
        results["morita"] = mor.to_json()
        rep.claim("corners at X and Y are Morita equivalent", "sufficient condition Σ(X) = Σ(Y)",
                  _verdict(mor), {"n_max": a.n_max}, mor.value.value != "unknown")
    simp = simplicity_decision(g, X, a.n_max, a.p_bound)
    results["simplicity"] = {
        "verdict": simp.verdict,
        "reasons": list(simp.reasons),
        "premises": {k: v.to_json() for k, v in simp.premises.items()},
    }
    results["verdict"] = simp.verdict
    rf = row_finite_report(g)
    results["row_finite"] = {"row_finite": rf.row_finite, "sources": sorted(rf.sources), "sinks": sorted(rf.sinks)}
    results["locally_convex"] = is_locally_convex(g).to_json()
    results["finitely_aligned"] = is_finitely_aligned(g).to_json()
    rep.claim("corner at X is simple",
              "simple when row finite, relatively aperiodic and relatively cofinal; "
              "not simple when aperiodic but not relatively cofinal",
              simp.verdict, bounds, simp.verdict != "Unknown",
              premises=[f"{k}: {v.value.value}" for k, v in simp.premises.items()])
    rep.results = results
    rep.text.append(f"  Σ(X) = {{{', '.join(sorted(res.closure))}}}; full = {full.value.value}")
    rep.text.append(f"  simplicity: {simp.verdict} ({'; '.join(simp.reasons)})")
    return 0


def cmd_dual(g: KGraph, a, rep: Report) -> int:
    p = parse_degree(a.p, g.rank)
    d = dual_graph(g, p)
    rep.results = {
        "p": list(p),
        "vertices": len(d.vertices),
        "edges": len(d.edges),
        "squares": len(d.squares),
        "graph": dump_graph(d).splitlines(),
        "notes": list(d.notes),
    }
    if a.x:
        X = _paths_arg(g, a.x)
        t = check_pairwise_min_empty(g, p, X)
        rep.results["pairwise_min_empty"] = t.to_json()
        rep.claim("members of X have pairwise empty Λ^min", "pairwise scan", _verdict(t))
    rep.claim("dual graph pΛ", "vertices Λ^p, edges Λ^{p+e_i}, squares by factorisation", None,
              {"p": list(p)}, not d.notes)
    rep.text.append(f"  {len(d.vertices)} vertices, {len(d.edges)} edges, {len(d.squares)} squares")
    return 0


def cmd_skew(g: KGraph, a, rep: Report) -> int:
    if a.cocycle:
        G, c = parse_group_cocycle(read_text(a.cocycle), a.cocycle)
        if a.group:
            G = parse_group_spec(a.group)
    else:
        G = parse_group_spec(a.group) if a.group else GroupSpec.free(g.rank)
        c = Cocycle("degree")
    w = parse_window(a.window)
    sk = skew_product(g, G, c, w)
    rep.boundary = True
    rep.results = {
        "group_moduli": list(G.moduli),
        "window": str(w),
        "vertices": len(sk.vertices),
        "edges": len(sk.edges),
        "squares": len(sk.squares),
        "boundary_vertices": sorted(sk.truncation.vertices),
        "graph": dump_graph(sk).splitlines(),
    }
    rep.claim("windowed skew product", "edges kept when both endpoints lie in the window", None,
              {"window": str(w)})
    rep.text.append(f"  {len(sk.vertices)} vertices, {len(sk.edges)} edges, {len(sk.squares)} squares")
    return 0


def cmd_morphism_check(g: KGraph, a, rep: Report) -> int:
    g2 = resolve_graph(a.target)
    phi = parse_morphism(read_text(a.map), a.map)
    ok, bad = validate_morphism(phi, g, g2)
    rep.results = {"target": g2.name, "valid": ok, "violations": bad}
    rep.claim("φ is a k-graph morphism", "colour, source, range and square preservation", "yes" if ok else "no")
    if ok and a.x:
        X = vertex_ids(g, parse_vertex_list(a.x))
        n = parse_degree(a.max_degree, g.rank)
        t = is_saturated_morphism(phi, g, g2, X, n)
        rep.results["saturated"] = t.to_json()
        rep.claim("φ is saturated with respect to X", "XΛ₁ → φ(X)Λ₂ bijective degree by degree",
                  _verdict(t), {"max_degree": list(n)})
    rep.text.append(f"  valid = {str(ok).lower()}" + "".join(f"\n  {b}" for b in bad))
    return 0


def cmd_ck_span(g: KGraph, a, rep: Report) -> int:
    X = vertex_ids(g, parse_vertex_list(a.x)) if a.x else None
    F = [parse_generator(g, t) for t in a.f]
    C = closure_of(g, F, X)
    check = verify_span_closed(g, C, X)
    rep.results = {
        "F": [gen.literal for gen in F],
        "N": list(C.N),
        "Lambda_F": [p.literal for p in C.Lambda_F],
        "Lambda_leq_F": [p.literal for p in C.Lambda_leq_F],
        "Lambda_NF": [p.literal for p in C.Lambda_NF],
        "Fbar": [gen.literal for gen in C.Fbar],
        "dimension": C.dimension,
        **check.to_json(),
    }
    rep.claim("span of F̄ is closed under multiplication", "every product of F̄ members expands inside F̄",
              "yes" if check.closed else "no", {"N": list(C.N)})
    rep.text.append(f"  |F̄| = {C.dimension}; closed = {str(check.closed).lower()}")
    if not check.closed:
        raise InternalDefect("; ".join(check.defects[:5]))
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "paths": cmd_paths,
    "lambda-min": cmd_lambda_min,
    "exhaustive": cmd_exhaustive,
    "saturate": cmd_saturate,
    "essential": cmd_essential,
    "corner-report": cmd_corner_report,
    "dual": cmd_dual,
    "skew": cmd_skew,
    "morphism-check": cmd_morphism_check,
    "ck-span": cmd_ck_span,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # bad usage is an input error (1); 2 is reserved for internal defects
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="kgraph-lab", description="Combinatorial analyses of finitely aligned k-graphs.")
    ap.add_argument("--fixtures", action="store_true", help="list built-in graphs (use as --graph fixture:NAME)")
    ap.add_argument("--version", action="version", version=f"kgraph-lab {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help, description=help)
        p.add_argument("--graph", required=True, help="graph file or fixture:NAME")
        p.add_argument("--format", choices=["text", "json"], default="text")
        return p

    add("validate", "check a graph presentation")
    p = add("paths", "enumerate vΛ^n or paths up to a degree")
    p.add_argument("--vertex", required=True)
    p.add_argument("--degree")
    p.add_argument("--max-degree", default="2")
    p = add("lambda-min", "minimal common extensions of two paths")
    p.add_argument("--lam", required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--degree", help="also list common extensions of this degree")
    p = add("exhaustive", "test or search for finite exhaustive sets")
    p.add_argument("--vertex", required=True)
    p.add_argument("--e", help="comma-separated paths; omit to search")
    p.add_argument("--target", help="restrict the search to sources in these vertices")
    p.add_argument("--max-degree", help="probe bound")
    p.add_argument("--n-max", type=int, default=6)
    p = add("saturate", "compute Σ(V)")
    p.add_argument("--set", "--x", dest="set", required=True)
    p.add_argument("--n-max", type=int, default=6)
    p = add("essential", "stranded vertices and the essential subgraph")
    p.add_argument("--literal", action="store_true", help="ignore window cuts")
    p = add("corner-report", "fullness, Morita comparison and simplicity of a corner")
    p.add_argument("--x", "--set", dest="x", required=True)
    p.add_argument("--y")
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--p-bound", type=int, default=4)
    p = add("dual", "dual graph pΛ")
    p.add_argument("--p", required=True)
    p.add_argument("--x", help="paths of degree p to test for pairwise empty Λ^min")
    p = add("skew", "windowed skew product")
    p.add_argument("--group", help="e.g. 'Z^2' or 'Z^1 mod 3'; default Z^k")
    p.add_argument("--cocycle", help="group/cocycle file; default is the degree cocycle")
    p.add_argument("--window", required=True, help="lo..hi per coordinate; write --window=-2..2 for negative bounds")
    p = add("morphism-check", "validate a morphism and test saturation")
    p.add_argument("--target", required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--x", "--set", dest="x")
    p.add_argument("--max-degree", default="3")
    p = add("ck-span", "finite closure F̄ and its structure constants")
    p.add_argument("--f", action="append", required=True, help="generator literal T(alpha|beta); repeatable")
    p.add_argument("--x", help="restrict generators to ranges in X")
    return ap


def _arguments(a) -> dict:
    return {k: v for k, v in sorted(vars(a).items()) if k not in ("command", "format", "fixtures")}


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:  # usage errors, --help, --version
        return int(exc.code or 0)
    if a.fixtures:
        for name in FIXTURES:
            print(f"{name:16s} {describe_fixture(name)}")
        return 0
    if not a.command:
        ap.print_usage(sys.stderr)
        return 1
    try:
        seed = _seed()
        g = resolve_graph(a.graph)
    except ValidationError as exc:
        if a.command == "validate":
            # report the violations instead of bailing out
            g = FIXTURES[a.graph[8:]]() if a.graph.startswith("fixture:") else load_graph(a.graph)
        else:
            print(f"kgraph-lab: invalid graph: {exc}", file=sys.stderr)
            return 1
    except (ParseError, KGraphError, OSError) as exc:
        print(f"kgraph-lab: {exc}", file=sys.stderr)
        return 1

    rep = Report(a.command, g, _arguments(a), seed)
    try:
        status = COMMANDS[a.command](g, a, rep)
    except InternalDefect as exc:
        print(f"kgraph-lab: internal defect: {exc}", file=sys.stderr)
        _emit(rep, a.format)
        return 2
    except (ParseError, KGraphError, OSError) as exc:
        print(f"kgraph-lab: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # anything else is our bug, not the input's
        print(f"kgraph-lab: internal defect: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    _emit(rep, a.format)
    return status


def _emit(rep: Report, fmt: str) -> None:
    print(render_json(rep) if fmt == "json" else render_text(rep))


if __name__ == "__main__":
    sys.exit(main())
