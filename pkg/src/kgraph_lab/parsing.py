"""Line-oriented file formats for graphs, groups/cocycles and morphism maps.

Graph files::

    kgraph T2 rank 2
    vertex v
    edge e color 1 from v to v
    edge f color 2 from v to v
    square e f = f e

Windowed graphs may also carry ``open-range <v> <i>`` / ``open-source <v> <i>``
lines naming edge slots cut by the window.
"""

from __future__ import annotations

import re
from pathlib import Path as FsPath
from typing import Iterable

from .constructions import Cocycle, GroupSpec, MorphismMap, Window
from .core import Edge, KGraph, Square, Truncation
from .errors import KGraphError, ParseError, UnknownId

_TOKEN = r"[^\s#=]+"


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def parse_graph(text: str, source: str = "<input>") -> KGraph:
    """Parse a graph file.  The result is not validated."""
    name, rank = "", None
    vertices: list[str] = []
    edges: list[Edge] = []
    squares: list[Square] = []
    open_range, open_source = set(), set()
    seen_v: set[str] = set()
    seen_e: set[str] = set()
    for no, line in _lines(text):
        words = line.split()
        head = words[0]
        if head == "kgraph":
            m = re.fullmatch(rf"kgraph\s+({_TOKEN})\s+rank\s+(\d+)", line)
            if not m or rank is not None:
                raise ParseError("expected a single 'kgraph <name> rank <k>' header", source, no)
            name, rank = m.group(1), int(m.group(2))
            if rank < 1:
                raise ParseError("rank must be positive", source, no)
            continue
        if rank is None:
            raise ParseError("'kgraph <name> rank <k>' must come first", source, no)
        if head == "vertex":
            if len(words) != 2:
                raise ParseError("expected 'vertex <id>'", source, no)
            if words[1] in seen_v:
                raise ParseError(f"duplicate vertex {words[1]}", source, no)
            seen_v.add(words[1])
            vertices.append(words[1])
        elif head == "edge":
            m = re.fullmatch(rf"edge\s+({_TOKEN})\s+colou?r\s+(\d+)\s+from\s+({_TOKEN})\s+to\s+({_TOKEN})", line)
            if not m:
                raise ParseError("expected 'edge <id> color <i> from <src> to <rng>'", source, no)
            eid, col, src, rng = m.group(1), int(m.group(2)), m.group(3), m.group(4)
            if not 1 <= col <= rank:
                raise ParseError(f"colour {col} outside 1..{rank}", source, no)
            for v in (src, rng):
                if v not in seen_v:
                    raise ParseError(f"unknown vertex {v}", source, no)
            if eid in seen_e:
                raise ParseError(f"duplicate edge {eid}", source, no)
            seen_e.add(eid)
            edges.append(Edge(eid, col, src, rng))
        elif head == "square":
            m = re.fullmatch(rf"square\s+({_TOKEN})\s+({_TOKEN})\s*=\s*({_TOKEN})\s+({_TOKEN})", line)
            if not m:
                raise ParseError("expected 'square <e> <f> = <f2> <e2>'", source, no)
            for e in m.groups():
                if e not in seen_e:
                    raise ParseError(f"unknown edge {e}", source, no)
            squares.append(Square(*m.groups()))
        elif head in ("open-range", "open-source"):
            if len(words) != 3 or words[1] not in seen_v or not words[2].isdigit():
                raise ParseError(f"expected '{head} <vertex> <colour>'", source, no)
            (open_range if head == "open-range" else open_source).add((words[1], int(words[2])))
        else:
            raise ParseError(f"unknown directive {head!r}", source, no)
    if rank is None:
        raise ParseError("empty graph file", source, None)
    trunc = Truncation(frozenset(open_range), frozenset(open_source)) if open_range or open_source else None
    return KGraph(rank, vertices, edges, squares, name=name, truncation=trunc)


def dump_graph(g: KGraph) -> str:
    out = [f"kgraph {g.name or 'unnamed'} rank {g.rank}"]
    out += [f"vertex {v}" for v in g.vertices]
    out += [f"edge {e.id} color {e.color} from {e.src} to {e.rng}" for e in g.edges]
    out += [f"square {s.e} {s.f} = {s.f2} {s.e2}" for s in g.squares]
    if g.truncation is not None:
        out += [f"open-range {v} {i}" for v, i in sorted(g.truncation.open_range)]
        out += [f"open-source {v} {i}" for v, i in sorted(g.truncation.open_source)]
    return "\n".join(out) + "\n"


def load_graph(path: str) -> KGraph:
    p = FsPath(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read: {exc.strerror}", str(p)) from None
    return parse_graph(text, str(p))


def _vector(text: str, source: str, no: int) -> tuple[int, ...]:
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1]
    try:
        return tuple(int(x) for x in body.split(",")) if body else ()
    except ValueError:
        raise ParseError(f"bad integer vector {text!r}", source, no) from None


def parse_group_cocycle(text: str, source: str = "<input>") -> tuple[GroupSpec, Cocycle]:
    """``group Z^m [mod q1 .. qm]`` followed by ``cocycle degree`` or ``cocycle edge <id> = (..)`` lines."""
    group = None
    kind = None
    labels: dict[str, tuple[int, ...]] = {}
    for no, line in _lines(text):
        if line.startswith("group"):
            m = re.fullmatch(r"group\s+Z\^(\d+)(?:\s+mod((?:\s+\d+)+))?", line)
            if not m:
                raise ParseError("expected 'group Z^m [mod q1 .. qm]'", source, no)
            rank = int(m.group(1))
            moduli = tuple(int(x) for x in m.group(2).split()) if m.group(2) else (0,) * rank
            if len(moduli) != rank:
                raise ParseError(f"need {rank} moduli, got {len(moduli)}", source, no)
            group = GroupSpec(moduli)
        elif line == "cocycle degree":
            kind = "degree"
        elif line.startswith("cocycle edge"):
            m = re.fullmatch(rf"cocycle\s+edge\s+({_TOKEN})\s*=\s*(.+)", line)
            if not m:
                raise ParseError("expected 'cocycle edge <id> = (c1,..,cm)'", source, no)
            if kind == "degree":
                raise ParseError("cannot mix 'cocycle degree' with edge labels", source, no)
            kind = "labels"
            labels[m.group(1)] = _vector(m.group(2), source, no)
        else:
            raise ParseError(f"unknown directive {line.split()[0]!r}", source, no)
    if group is None:
        raise ParseError("missing 'group' line", source, None)
    if kind is None:
        raise ParseError("missing 'cocycle' line", source, None)
    for eid, lab in labels.items():
        if len(lab) != group.rank:
            raise ParseError(f"label of {eid} has length {len(lab)}, group rank is {group.rank}", source, None)
    return group, Cocycle(kind, labels)


def parse_group_spec(text: str) -> GroupSpec:
    """Inline form for the CLI: ``Z^2`` or ``Z^2 mod 0 3``."""
    g, _ = parse_group_cocycle(f"group {text.strip()}\ncocycle degree\n", "--group")
    return g


def parse_window(text: str) -> Window:
    """``lo..hi`` per coordinate, comma separated, e.g. ``-2..2,-2..2``."""
    lo, hi = [], []
    for part in text.split(","):
        m = re.fullmatch(r"\s*(-?\d+)\.\.(-?\d+)\s*", part)
        if not m:
            raise ParseError(f"bad window coordinate {part!r}; expected lo..hi", "--window")
        lo.append(int(m.group(1)))
        hi.append(int(m.group(2)))
    try:
        return Window(tuple(lo), tuple(hi))
    except KGraphError as exc:
        raise ParseError(str(exc), "--window") from None


def parse_morphism(text: str, source: str = "<input>") -> MorphismMap:
    """Lines ``vertex a -> b`` and ``edge e -> f``."""
    vmap: dict[str, str] = {}
    emap: dict[str, str] = {}
    for no, line in _lines(text):
        m = re.fullmatch(rf"(vertex|edge)\s+({_TOKEN})\s*->\s*({_TOKEN})", line)
        if not m:
            raise ParseError("expected 'vertex <a> -> <b>' or 'edge <e> -> <f>'", source, no)
        table = vmap if m.group(1) == "vertex" else emap
        if m.group(2) in table:
            raise ParseError(f"{m.group(1)} {m.group(2)} mapped twice", source, no)
        table[m.group(2)] = m.group(3)
    return MorphismMap(vmap, emap)


def dump_morphism(phi: MorphismMap) -> str:
    out = [f"vertex {a} -> {b}" for a, b in sorted(phi.vertex_map.items())]
    out += [f"edge {a} -> {b}" for a, b in sorted(phi.edge_map.items())]
    return "\n".join(out) + "\n"


def parse_vertex_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def parse_degree(text: str, rank: int) -> tuple[int, ...]:
    vals = _vector(text, "--p", 0)
    if len(vals) == 1 and rank > 1:
        vals = vals * rank
    if len(vals) != rank or any(x < 0 for x in vals):
        raise ParseError(f"expected {rank} nonnegative integers, got {text!r}", "degree")
    return vals


def read_text(path: str) -> str:
    try:
        return FsPath(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read: {exc.strerror}", path) from None


def vertex_ids(g: KGraph, names: Iterable[str]) -> list[str]:
    names = list(names)
    for v in names:
        if v not in g.vertex_set:
            raise UnknownId(f"unknown vertex {v!r}")
    return names
