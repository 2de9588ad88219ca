"""Derived graphs: duals, skew products, lattice windows, and morphisms."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .alignment import lambda_min, row_finite_report
from .closure import is_essentially_saturated, is_finitely_exhaustive, saturation
from .core import (
    Edge,
    KGraph,
    Path,
    Square,
    Truncation,
    add,
    compose,
    degrees_upto,
    enumerate_paths,
    factorize,
    sort_paths,
    unit,
    validate_kgraph,
)
from .errors import DegreeMismatch, KGraphError, WindowTooSmall
from .verdicts import TriState


# ---------------------------------------------------------------------------
# dual graph


def _bracket(p: Path) -> str:
    return f"[{p.literal}]"


def dual_graph(g: KGraph, p: Sequence[int]) -> KGraph:
    """The dual graph pΛ.

    Vertices are the paths of degree ``p``; colour-``i`` edges are the paths
    of degree ``p + e_i``, with source the degree-``p`` head and range the
    degree-``p`` tail.  Squares come from factorising paths of degree
    ``p + e_i + e_j``.  Ids are bracketed path literals, e.g. ``[a.b]``.
    """
    p = tuple(p)
    k = g.rank
    verts = sort_paths(q for v in g.vertices for q in enumerate_paths(g, v, p))
    edges: list[Edge] = []
    by_id: dict[str, Path] = {}
    for i in range(1, k + 1):
        for lam in sort_paths(q for v in g.vertices for q in enumerate_paths(g, v, add(p, unit(k, i)))):
            head, _ = factorize(g, lam, p)
            _, tail = factorize(g, lam, unit(k, i))
            eid = _bracket(lam)
            by_id[eid] = lam
            edges.append(Edge(eid, i, _bracket(head), _bracket(tail)))

    squares = []
    proto = KGraph(k, [_bracket(q) for q in verts], edges)
    for x in edges:
        for j in range(x.color + 1, k + 1):
            for y in proto.edges_in(x.src, j):
                xp, yp = by_id[x.id], by_id[y.id]
                _, x_rest = factorize(g, xp, p)
                z = compose(g, yp, x_rest)
                lo, _ = factorize(g, z, add(p, unit(k, x.color)))
                _, hi = factorize(g, z, unit(k, x.color))
                squares.append(Square(x.id, y.id, _bracket(hi), _bracket(lo)))

    notes = []
    report = row_finite_report(g)
    if report.sources:
        notes.append("input has sources; pΛ need not carry the same algebra")
    out = KGraph(k, [_bracket(q) for q in verts], edges, squares, name=f"{g.name}^dual({','.join(map(str, p))})", notes=notes)
    return validate_kgraph(out)


def check_pairwise_min_empty(g: KGraph, p: Sequence[int], X: Iterable[Path]) -> TriState:
    """Whether distinct members of ``X ⊆ Λ^p`` have no common extension."""
    p = tuple(p)
    X = sort_paths(set(X))
    for lam in X:
        if lam.degree != p:
            raise DegreeMismatch(f"{lam} has degree {lam.degree}, expected {p}")
    for a, b in itertools.combinations(X, 2):
        if lambda_min(g, a, b):
            return TriState.no((a, b), f"Λ^min({a},{b}) is nonempty")
    return TriState.yes("pairwise Λ^min empty")


# ---------------------------------------------------------------------------
# groups, cocycles, windows


@dataclass(frozen=True)
class GroupSpec:
    """Finitely generated abelian group Z^m with per-coordinate moduli (0 = infinite)."""

    moduli: tuple[int, ...]

    @classmethod
    def free(cls, m: int) -> "GroupSpec":
        return cls((0,) * m)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    def reduce(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(a % q if q else a for a, q in zip(x, self.moduli))

    def add(self, x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
        return self.reduce(tuple(a + b for a, b in zip(x, y)))

    @property
    def identity(self) -> tuple[int, ...]:
        return (0,) * self.rank


@dataclass(frozen=True)
class Cocycle:
    """A functor c: Λ → G generated by edge labels.

    ``kind == "degree"`` uses the degree functor into Z^k.
    """

    kind: str = "degree"
    labels: Mapping[str, tuple[int, ...]] = field(default_factory=dict)

    def value(self, g: KGraph, G: GroupSpec, edge: str) -> tuple[int, ...]:
        if self.kind == "degree":
            return G.reduce(unit(g.rank, g.color(edge)))
        return G.reduce(self.labels[edge])

    def of_path(self, g: KGraph, G: GroupSpec, p: Path) -> tuple[int, ...]:
        total = G.identity
        for e in p.edges:
            total = G.add(total, self.value(g, G, e))
        return total


def validate_cocycle(g: KGraph, G: GroupSpec, c: Cocycle) -> list[str]:
    """Problems preventing ``c`` from extending to a functor; empty when fine."""
    problems = []
    if c.kind == "degree":
        if G.rank != g.rank:
            problems.append(f"degree cocycle needs a rank-{g.rank} group, got rank {G.rank}")
        return problems
    for e in g.edges:
        if e.id not in c.labels:
            problems.append(f"edge {e.id} has no label")
        elif len(c.labels[e.id]) != G.rank:
            problems.append(f"label of {e.id} has wrong length")
    if problems:
        return problems
    for sq in g.squares:
        left = G.add(c.value(g, G, sq.e), c.value(g, G, sq.f))
        right = G.add(c.value(g, G, sq.f2), c.value(g, G, sq.e2))
        if left != right:
            problems.append(f"square {sq.e}.{sq.f}={sq.f2}.{sq.e2}: {left} != {right}")
    return problems


@dataclass(frozen=True)
class Window:
    """The box ``lo <= x <= hi`` of group (or lattice) coordinates."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or any(a > b for a, b in zip(self.lo, self.hi)):
            raise KGraphError(f"malformed window {self.lo}..{self.hi}")

    @classmethod
    def cube(cls, m: int, radius: int) -> "Window":
        return cls((-radius,) * m, (radius,) * m)

    def points(self) -> list[tuple[int, ...]]:
        return [tuple(x) for x in itertools.product(*(range(a, b + 1) for a, b in zip(self.lo, self.hi)))]

    def elements(self, G: GroupSpec) -> list[tuple[int, ...]]:
        return sorted({G.reduce(x) for x in self.points()})

    def __str__(self) -> str:
        return ",".join(f"{a}..{b}" for a, b in zip(self.lo, self.hi))


def _fmt(x: Sequence[int]) -> str:
    return ",".join(str(a) for a in x)


def pair_id(x: Sequence[int], name: str) -> str:
    return f"({_fmt(x)}|{name})"


def skew_product(g: KGraph, G: GroupSpec, c: Cocycle, w: Window) -> KGraph:
    """G ×_c Λ over the window ``w``.

    Vertices ``(x|v)``, edges ``(x|e)`` with range ``(x, r(e))`` and source
    ``(x + c(e), s(e))``; an edge is kept when both endpoints lie in the
    window.  Cut edges are recorded as truncation slots.
    """
    problems = validate_cocycle(g, G, c)
    if problems:
        raise KGraphError("; ".join(problems))
    if len(w.lo) != G.rank:
        raise KGraphError(f"window has rank {len(w.lo)}, group has rank {G.rank}")
    elems = w.elements(G)
    inside = set(elems)
    if not elems:
        raise WindowTooSmall("empty window")
    label = {e.id: c.value(g, G, e.id) for e in g.edges}
    verts = [pair_id(x, v) for x in elems for v in g.vertices]
    edges, open_range, open_source = [], set(), set()
    for x in elems:
        for e in g.edges:
            y = G.add(x, label[e.id])
            if y in inside:
                edges.append(Edge(pair_id(x, e.id), e.color, pair_id(y, e.src), pair_id(x, e.rng)))
            else:
                open_range.add((pair_id(x, e.rng), e.color))
            back = G.reduce(tuple(a - b for a, b in zip(x, label[e.id])))
            if back not in inside:
                open_source.add((pair_id(x, e.src), e.color))
    ids = {e.id for e in edges}
    squares = []
    for x in elems:
        for sq in g.squares:
            xe = G.add(x, label[sq.e])
            xf2 = G.add(x, label[sq.f2])
            quad = (pair_id(x, sq.e), pair_id(xe, sq.f), pair_id(x, sq.f2), pair_id(xf2, sq.e2))
            if all(q in ids for q in quad):
                squares.append(Square(*quad))
    if g.squares and not squares:
        raise WindowTooSmall(f"no factorisation square fits in window {w}")
    trunc = Truncation(frozenset(open_range), frozenset(open_source))
    out = KGraph(g.rank, verts, edges, squares, name=f"{g.name}-skew", truncation=trunc, window=w)
    return validate_kgraph(out)


@dataclass(frozen=True)
class SkewCornerExperiment:
    combinatorial: TriState
    corner_full: TriState
    agree: bool
    window: Window
    closure: frozenset
    boundary: frozenset
    complete: bool


def skew_corner_experiment(g: KGraph, w: Window, n_max: int = 6) -> SkewCornerExperiment:
    """Compare the combinatorial criterion with windowed fullness of the corner at {0}×Λ^0.

    (a) is "essentially saturated and finitely exhaustive" on ``g``; (b) is
    whether Σ({(0,v)}) in the windowed skew product by Z^k (degree cocycle)
    covers every vertex not cut by the window.
    """
    ess = is_essentially_saturated(g)
    fin = is_finitely_exhaustive(g, n_max)
    if ess.is_yes and fin.is_yes:
        a = TriState.yes("essentially saturated and finitely exhaustive")
    elif ess.is_no or fin.is_no:
        a = TriState.no(ess.witness if ess.is_no else fin.witness, ess.note if ess.is_no else fin.note)
    else:
        a = TriState.unknown(f"{ess.note}; {fin.note}")

    G = GroupSpec.free(g.rank)
    sk = skew_product(g, G, Cocycle("degree"), w)
    X = [pair_id(G.identity, v) for v in g.vertices]
    res = saturation(sk, X, n_max)
    boundary = sk.truncation.vertices if sk.truncation else frozenset()
    interior = frozenset(sk.vertices) - boundary
    missing = sorted(interior - res.closure)
    if not missing:
        b = TriState.yes(f"Σ(V) covers every interior vertex of window {w}")
    elif res.complete:
        b = TriState.no(missing[0], f"{len(missing)} interior vertices outside Σ(V)")
    else:
        b = TriState.unknown(f"saturation incomplete at n_max={n_max}")
    agree = a.value is b.value and not a.value is a.value.__class__.UNKNOWN
    return SkewCornerExperiment(a, b, agree, w, res.closure, boundary, res.complete)


# ---------------------------------------------------------------------------
# lattice windows


def _lattice_id(m: Sequence[int]) -> str:
    return f"({_fmt(m)})"


def _lattice_edge_id(i: int, m: Sequence[int]) -> str:
    return f"e{i}({_fmt(m)})"


def _lattice_window(k: int, lo: int, hi: int, open_low: bool, name: str) -> KGraph:
    """The box [lo, hi]^k of the lattice k-graph with paths (m, n), r = m, s = n."""
    box = [tuple(x) for x in itertools.product(range(lo, hi + 1), repeat=k)]
    inside = set(box)
    edges, squares = [], []
    open_range, open_source = set(), set()
    for m in box:
        for i in range(1, k + 1):
            up = add(m, unit(k, i))
            if up in inside:
                edges.append(Edge(_lattice_edge_id(i, m), i, _lattice_id(up), _lattice_id(m)))
            else:
                open_range.add((_lattice_id(m), i))
            if open_low and m[i - 1] == lo:
                open_source.add((_lattice_id(m), i))
        for i in range(1, k + 1):
            for j in range(i + 1, k + 1):
                mi, mj = add(m, unit(k, i)), add(m, unit(k, j))
                if add(mi, unit(k, j)) in inside:
                    squares.append(
                        Square(
                            _lattice_edge_id(i, m),
                            _lattice_edge_id(j, mi),
                            _lattice_edge_id(j, m),
                            _lattice_edge_id(i, mj),
                        )
                    )
    trunc = Truncation(frozenset(open_range), frozenset(open_source))
    window = Window((lo,) * k, (hi,) * k)
    return validate_kgraph(
        KGraph(k, [_lattice_id(m) for m in box], edges, squares, name=name, truncation=trunc, window=window)
    )


def omega_window(k: int, N: int) -> KGraph:
    """Ω_k restricted to [0, N]^k.  Only the top faces are window cuts."""
    return _lattice_window(k, 0, N, False, f"Omega{k}[0..{N}]")


def delta_window(k: int, radius: int) -> KGraph:
    """Δ_k restricted to [-radius, radius]^k; every face is a window cut."""
    return _lattice_window(k, -radius, radius, True, f"Delta{k}[{-radius}..{radius}]")


def lattice_vertex(m: Sequence[int]) -> str:
    return _lattice_id(m)


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True)
class MorphismMap:
    vertex_map: Mapping[str, str]
    edge_map: Mapping[str, str]


def map_path(phi: MorphismMap, target: KGraph, p: Path) -> Path:
    if p.is_vertex:
        return target.identity(phi.vertex_map[p.rng])
    return target.path([phi.edge_map[e] for e in p.edges])


def validate_morphism(phi: MorphismMap, g1: KGraph, g2: KGraph) -> tuple[bool, list[str]]:
    """Check that ``phi`` is a degree-preserving functor ``g1 → g2``."""
    bad = []
    for v in g1.vertices:
        if phi.vertex_map.get(v) not in g2.vertex_set:
            bad.append(f"vertex {v} has no image in the target")
    for e in g1.edges:
        img = phi.edge_map.get(e.id)
        if img not in g2.edge:
            bad.append(f"edge {e.id} has no image in the target")
            continue
        f = g2.edge[img]
        if f.color != e.color:
            bad.append(f"edge {e.id}: colour {e.color} sent to colour {f.color}")
        if phi.vertex_map.get(e.src) != f.src:
            bad.append(f"edge {e.id}: source not preserved")
        if phi.vertex_map.get(e.rng) != f.rng:
            bad.append(f"edge {e.id}: range not preserved")
    if bad:
        return False, bad
    for sq in g1.squares:
        left = g2.path([phi.edge_map[sq.e], phi.edge_map[sq.f]])
        right = g2.path([phi.edge_map[sq.f2], phi.edge_map[sq.e2]])
        if left != right:
            bad.append(f"square {sq.e}.{sq.f}={sq.f2}.{sq.e2} not preserved")
    return not bad, bad


def is_saturated_morphism(
    phi: MorphismMap, g1: KGraph, g2: KGraph, X: Iterable[str], degree_bound: Sequence[int]
) -> TriState:
    """Whether ``phi`` maps XΛ₁ bijectively onto φ(X)Λ₂, degree by degree up to the bound.

    Also known as a relatively saturated morphism.
    """
    X = sorted(set(X))
    image_vertices = sorted({phi.vertex_map[v] for v in X})
    for n in degrees_upto(degree_bound):
        seen: dict[Path, Path] = {}
        for v in X:
            for p in enumerate_paths(g1, v, n):
                q = map_path(phi, g2, p)
                if q in seen:
                    return TriState.no((seen[q], p), f"{seen[q]} and {p} both map to {q}")
                seen[q] = p
        for w in image_vertices:
            for q in sort_paths(enumerate_paths(g2, w, n)):
                if q not in seen:
                    return TriState.no(q, f"{q} is not the image of a path from X")
    return TriState.yes(f"bijective at every degree <= {tuple(degree_bound)}")
