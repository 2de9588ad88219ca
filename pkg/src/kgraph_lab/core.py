"""Finite presentations of k-graphs and path arithmetic.

A k-graph is given by its coloured skeleton (vertices, edges of degree
``e_i``) together with the factorisation squares ``e f = f' e'`` that record
the unique bicoloured factorisations.  Morphisms of the category are
represented as :class:`Path` values in colour-sorted normal form: the edge
sequence (read range to source) lists every colour-1 edge first, then the
colour-2 edges, and so on.

Degrees are plain tuples of ints.  The helpers ``degree_join``,
``degree_meet`` and ``degree_leq`` implement the coordinatewise lattice.
"""

from __future__ import annotations

import itertools
import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import (
    BoundRequired,
    DegreeOutOfRange,
    KGraphError,
    NotComposable,
    RankMismatch,
    UnknownId,
    ValidationError,
)

Degree = tuple[int, ...]


# ---------------------------------------------------------------------------
# degrees


def _check_rank(m: Sequence[int], n: Sequence[int]) -> None:
    if len(m) != len(n):
        raise RankMismatch(f"degrees {tuple(m)} and {tuple(n)} have different rank")


def zero(k: int) -> Degree:
    return (0,) * k


def unit(k: int, i: int) -> Degree:
    """The generator ``e_i`` of N^k; colours are 1-based."""
    return tuple(1 if j == i - 1 else 0 for j in range(k))


def add(m: Sequence[int], n: Sequence[int]) -> Degree:
    _check_rank(m, n)
    return tuple(a + b for a, b in zip(m, n))


def sub(m: Sequence[int], n: Sequence[int]) -> Degree:
    _check_rank(m, n)
    return tuple(a - b for a, b in zip(m, n))


def degree_join(m: Sequence[int], n: Sequence[int]) -> Degree:
    _check_rank(m, n)
    return tuple(max(a, b) for a, b in zip(m, n))


def degree_meet(m: Sequence[int], n: Sequence[int]) -> Degree:
    _check_rank(m, n)
    return tuple(min(a, b) for a, b in zip(m, n))


def degree_leq(m: Sequence[int], n: Sequence[int]) -> bool:
    _check_rank(m, n)
    return all(a <= b for a, b in zip(m, n))


def degrees_upto(bound: Sequence[int]) -> list[Degree]:
    """All degrees ``n <= bound``, ordered by total length then lexicographically."""
    out = [tuple(t) for t in itertools.product(*(range(b + 1) for b in bound))]
    out.sort(key=lambda d: (sum(d), d))
    return out


def colour_word(n: Sequence[int]) -> list[int]:
    """Colour sequence of a normal-form path of degree ``n``."""
    return [c for c, count in enumerate(n, start=1) for _ in range(count)]


def format_degree(n: Sequence[int]) -> str:
    return ",".join(str(x) for x in n)


# ---------------------------------------------------------------------------
# raw presentation


@dataclass(frozen=True)
class Edge:
    id: str
    color: int
    src: str
    rng: str


@dataclass(frozen=True)
class Square:
    """The relation ``e∘f = f2∘e2`` with ``color(e) < color(f)``."""

    e: str
    f: str
    f2: str
    e2: str

    @property
    def left(self) -> tuple[str, str]:
        return (self.e, self.f)

    @property
    def right(self) -> tuple[str, str]:
        return (self.f2, self.e2)


@dataclass(frozen=True)
class Truncation:
    """Edges cut off when an infinite graph is materialised over a window.

    ``open_range`` holds ``(v, i)`` when some colour-``i`` edge with range ``v``
    lies outside the window; ``open_source`` likewise for edges with source
    ``v``.  Analyses that respect the window treat the missing neighbours as
    ordinary (non-stranded) vertices.
    """

    open_range: frozenset = frozenset()
    open_source: frozenset = frozenset()

    @property
    def vertices(self) -> frozenset:
        return frozenset(v for v, _ in self.open_range) | frozenset(v for v, _ in self.open_source)


@dataclass(frozen=True)
class Violation:
    kind: str
    items: tuple[str, ...]
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.kind}({','.join(self.items)})"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


# ---------------------------------------------------------------------------
# paths


def split_top(text: str, sep: str) -> list[str]:
    """Split on ``sep`` outside parentheses and brackets."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


@dataclass(frozen=True, order=False)
class Path:
    """A morphism λ with ``r(λ) = rng`` and ``s(λ) = src``.

    ``edges`` is in normal form; the empty tuple is the identity at ``rng``.
    """

    rng: str
    src: str
    edges: tuple[str, ...]
    degree: Degree

    @property
    def is_vertex(self) -> bool:
        return not self.edges

    @property
    def literal(self) -> str:
        return ".".join(self.edges) if self.edges else self.rng

    def __str__(self) -> str:
        return self.literal

    def __repr__(self) -> str:
        return f"Path({self.literal})"


def sort_paths(paths: Iterable[Path]) -> list[Path]:
    return sorted(paths, key=lambda p: p.literal)


# ---------------------------------------------------------------------------
# the graph


class KGraph:
    """A finite k-graph presentation.

    Instances are built raw and become trusted after :func:`validate_kgraph`.
    Indexes are computed once at construction; nothing mutates afterwards
    except the internal memo table used by the enumeration helpers.
    """

    def __init__(
        self,
        rank: int,
        vertices: Iterable[str],
        edges: Iterable[Edge],
        squares: Iterable[Square] = (),
        name: str = "",
        truncation: Truncation | None = None,
        window=None,
        notes: Iterable[str] = (),
    ):
        self.rank = rank
        self.name = name
        self.vertices: tuple[str, ...] = tuple(vertices)
        self.edges: tuple[Edge, ...] = tuple(edges)
        self.squares: tuple[Square, ...] = tuple(squares)
        self.truncation = truncation
        self.window = window
        self.notes = tuple(notes)
        self.validated = False
        self._memo: dict = {}

        self.vertex_set = frozenset(self.vertices)
        self.edge = {e.id: e for e in self.edges}
        ins: dict = defaultdict(list)
        outs: dict = defaultdict(list)
        for e in self.edges:
            ins[(e.rng, e.color)].append(e)
            outs[(e.src, e.color)].append(e)
        self._in = {key: tuple(sorted(val, key=lambda e: e.id)) for key, val in ins.items()}
        self._out = {key: tuple(sorted(val, key=lambda e: e.id)) for key, val in outs.items()}
        self._swap: dict[tuple[str, str], tuple[str, str]] = {}
        for sq in self.squares:
            self._swap.setdefault(sq.left, sq.right)
            self._swap.setdefault(sq.right, sq.left)

    def __repr__(self) -> str:
        return f"KGraph({self.name or '?'}, rank={self.rank}, |V|={len(self.vertices)}, |E|={len(self.edges)})"

    # adjacency -----------------------------------------------------------

    def edges_in(self, v: str, color: int) -> tuple[Edge, ...]:
        """Edges of colour ``color`` with range ``v`` (the set vΛ^{e_i})."""
        return self._in.get((v, color), ())

    def edges_out(self, v: str, color: int) -> tuple[Edge, ...]:
        """Edges of colour ``color`` with source ``v`` (the set Λ^{e_i}v)."""
        return self._out.get((v, color), ())

    def color(self, e: str) -> int:
        return self.edge[e].color

    def swap(self, x: str, y: str) -> tuple[str, str]:
        try:
            return self._swap[(x, y)]
        except KeyError:
            raise KGraphError(f"no factorisation square for {x}.{y}") from None

    def has_cycle(self) -> bool:
        key = ("has_cycle",)
        if key not in self._memo:
            succ: dict = defaultdict(set)
            for e in self.edges:
                succ[e.rng].add(e.src)
            state: dict = {}

            def visit(v) -> bool:
                stack = [(v, iter(succ[v]))]
                state[v] = 1
                while stack:
                    node, it = stack[-1]
                    nxt = next(it, None)
                    if nxt is None:
                        state[node] = 2
                        stack.pop()
                    elif state.get(nxt) == 1:
                        return True
                    elif nxt not in state:
                        state[nxt] = 1
                        stack.append((nxt, iter(succ[nxt])))
                return False

            self._memo[key] = any(visit(v) for v in self.vertices if v not in state)
        return self._memo[key]

    # path construction ---------------------------------------------------

    def identity(self, v: str) -> Path:
        if v not in self.vertex_set:
            raise UnknownId(f"unknown vertex {v!r}")
        return Path(v, v, (), zero(self.rank))

    def path(self, edges: Sequence[str], rng: str | None = None) -> Path:
        """Normal form of a raw composable edge sequence."""
        if not edges:
            if rng is None:
                raise KGraphError("identity path needs a vertex")
            return self.identity(rng)
        for e in edges:
            if e not in self.edge:
                raise UnknownId(f"unknown edge {e!r}")
        for x, y in zip(edges, edges[1:]):
            if self.edge[x].src != self.edge[y].rng:
                raise NotComposable(f"{x} and {y} are not composable")
        seq = normalize(self, edges)
        deg = [0] * self.rank
        for e in seq:
            deg[self.edge[e].color - 1] += 1
        return Path(self.edge[seq[0]].rng, self.edge[seq[-1]].src, tuple(seq), tuple(deg))

    def parse_path(self, text: str) -> Path:
        text = text.strip()
        if text in self.vertex_set:
            return self.identity(text)
        return self.path(split_top(text, "."))


# ---------------------------------------------------------------------------
# normal forms


def normalize(g: KGraph, edges: Sequence[str], rng: random.Random | None = None) -> list[str]:
    """Sort a composable edge sequence into colour blocks using squares.

    With ``rng`` given, the out-of-order pair to rewrite is chosen at random;
    otherwise the leftmost one is used.  The result does not depend on the
    choice for a valid k-graph.
    """
    seq = list(edges)
    col = [g.edge[e].color for e in seq]
    while True:
        bad = [i for i in range(len(seq) - 1) if col[i] > col[i + 1]]
        if not bad:
            return seq
        i = rng.choice(bad) if rng is not None else bad[0]
        seq[i], seq[i + 1] = g.swap(seq[i], seq[i + 1])
        col[i], col[i + 1] = col[i + 1], col[i]


def _normalize_rightmost(g: KGraph, edges: Sequence[str]) -> list[str]:
    seq = list(edges)
    while True:
        bad = [i for i in range(len(seq) - 1) if g.color(seq[i]) > g.color(seq[i + 1])]
        if not bad:
            return seq
        i = bad[-1]
        seq[i], seq[i + 1] = g.swap(seq[i], seq[i + 1])


def reorder(g: KGraph, edges: Sequence[str], colours: Sequence[int]) -> list[str]:
    """Rewrite ``edges`` into the equivalent sequence with colour word ``colours``."""
    seq = list(edges)
    for i, want in enumerate(colours):
        j = i
        while g.color(seq[j]) != want:
            j += 1
        for t in range(j, i, -1):
            seq[t - 1], seq[t] = g.swap(seq[t - 1], seq[t])
    return seq


# ---------------------------------------------------------------------------
# validation


def check_kgraph(g: KGraph) -> ValidationReport:
    """List every way in which ``g`` fails to present a k-graph."""
    report = ValidationReport()
    bad = report.violations
    k = g.rank
    seen_ids: set[str] = set()
    for v in g.vertices:
        if v in seen_ids:
            bad.append(Violation("BadIncidence", (v,), "duplicate vertex id"))
        seen_ids.add(v)
    for e in g.edges:
        if e.id in seen_ids:
            bad.append(Violation("BadIncidence", (e.id,), "duplicate id"))
        seen_ids.add(e.id)
        if not 1 <= e.color <= k:
            bad.append(Violation("BadIncidence", (e.id,), f"colour {e.color} outside 1..{k}"))
        for end in (e.src, e.rng):
            if end not in g.vertex_set:
                bad.append(Violation("BadIncidence", (e.id, end), "unknown endpoint"))
    if bad:
        return report

    owner: dict[tuple[str, str], int] = defaultdict(int)
    for sq in g.squares:
        ids = (sq.e, sq.f, sq.f2, sq.e2)
        if any(x not in g.edge for x in ids):
            bad.append(Violation("BadIncidence", ids, "square mentions unknown edge"))
            continue
        e, f, f2, e2 = (g.edge[x] for x in ids)
        problems = []
        if not e.color < f.color:
            problems.append("left pair not colour increasing")
        if f2.color != f.color or e2.color != e.color:
            problems.append("colours not preserved")
        if e.src != f.rng:
            problems.append("left pair not composable")
        if f2.src != e2.rng:
            problems.append("right pair not composable")
        if e.rng != f2.rng or f.src != e2.src:
            problems.append("endpoints differ")
        if problems:
            bad.append(Violation("BadIncidence", ids, "; ".join(problems)))
            continue
        owner[sq.left] += 1
        owner[sq.right] += 1

    for pair, count in sorted(owner.items()):
        if count > 1:
            bad.append(Violation("DuplicateSquare", pair))

    for x in sorted(g.edges, key=lambda e: e.id):
        for c in range(1, k + 1):
            if c == x.color:
                continue
            for y in g.edges_in(x.src, c):
                if owner.get((x.id, y.id), 0) == 0:
                    lo, hi = (x.id, y.id) if x.color < y.color else (y.id, x.id)
                    bad.append(Violation("MissingSquare", (x.id, y.id), f"pair {lo}/{hi}"))
    if bad or k < 3:
        return report

    for y in sorted(g.edges, key=lambda e: e.id):
        for cx in range(1, k + 1):
            for x in g.edges_in(y.rng, cx):
                for cz in range(1, k + 1):
                    if len({cx, y.color, cz}) < 3:
                        continue
                    for z in g.edges_out(y.src, cz):
                        triple = [x.id, y.id, z.id]
                        if normalize(g, triple) != _normalize_rightmost(g, triple):
                            bad.append(Violation("CubeViolation", tuple(triple)))
    return report


def validate_kgraph(g: KGraph) -> KGraph:
    """Return ``g`` marked as validated, or raise :class:`ValidationError`."""
    report = check_kgraph(g)
    if not report.ok:
        raise ValidationError(report)
    g.validated = True
    return g


# ---------------------------------------------------------------------------
# composition and factorisation


def compose(g: KGraph, p: Path, q: Path) -> Path:
    """The product ``pq``; defined when ``s(p) = r(q)``."""
    if p.src != q.rng:
        raise NotComposable(f"s({p}) = {p.src} but r({q}) = {q.rng}")
    if not p.edges:
        return q
    if not q.edges:
        return p
    return g.path(p.edges + q.edges)


def factorize(g: KGraph, p: Path, m: Sequence[int]) -> tuple[Path, Path]:
    """The unique ``(head, tail)`` with ``d(head) = m`` and ``head·tail = p``."""
    m = tuple(m)
    if not degree_leq(m, p.degree) or any(x < 0 for x in m):
        raise DegreeOutOfRange(f"{m} is not below d({p}) = {p.degree}")
    rest = sub(p.degree, m)
    head_word, tail_word = colour_word(m), colour_word(rest)
    seq = reorder(g, p.edges, head_word + tail_word)
    cut = len(head_word)
    head_edges, tail_edges = tuple(seq[:cut]), tuple(seq[cut:])
    mid = g.edge[seq[cut]].rng if cut < len(seq) else p.src
    head = Path(p.rng, mid, head_edges, m) if head_edges else g.identity(p.rng)
    tail = Path(mid, p.src, tail_edges, rest) if tail_edges else g.identity(p.src)
    return head, tail


def segment(g: KGraph, p: Path, lo: Sequence[int], hi: Sequence[int]) -> Path:
    """The piece λ(lo, hi) of ``p`` sitting between degrees ``lo`` and ``hi``."""
    _, tail = factorize(g, p, lo)
    head, _ = factorize(g, tail, sub(hi, lo))
    return head


# ---------------------------------------------------------------------------
# enumeration


def enumerate_paths(g: KGraph, v: str, n: Sequence[int]) -> list[Path]:
    """vΛ^n: every path of degree ``n`` with range ``v``."""
    n = tuple(n)
    key = ("range", v, n)
    if key in g._memo:
        return g._memo[key]
    word = colour_word(n)
    out: list[Path] = []

    def walk(i: int, cur: str, acc: list[str]) -> None:
        if i == len(word):
            out.append(Path(v, cur, tuple(acc), n))
            return
        for e in g.edges_in(cur, word[i]):
            acc.append(e.id)
            walk(i + 1, e.src, acc)
            acc.pop()

    if v not in g.vertex_set:
        raise UnknownId(f"unknown vertex {v!r}")
    walk(0, v, [])
    g._memo[key] = out
    return out


def paths_with_source(g: KGraph, v: str, n: Sequence[int]) -> list[Path]:
    """Λ^n v: every path of degree ``n`` with source ``v``."""
    n = tuple(n)
    key = ("source", v, n)
    if key in g._memo:
        return g._memo[key]
    word = colour_word(n)[::-1]
    out: list[Path] = []

    def walk(i: int, cur: str, acc: list[str]) -> None:
        if i == len(word):
            out.append(Path(cur, v, tuple(reversed(acc)), n))
            return
        for e in g.edges_out(cur, word[i]):
            acc.append(e.id)
            walk(i + 1, e.rng, acc)
            acc.pop()

    if v not in g.vertex_set:
        raise UnknownId(f"unknown vertex {v!r}")
    walk(0, v, [])
    g._memo[key] = out
    return out


def paths_upto(g: KGraph, v: str, bound: Sequence[int]) -> list[Path]:
    """Every path with range ``v`` and degree ``<= bound``."""
    bound = tuple(bound)
    key = ("upto", v, bound)
    if key in g._memo:
        return g._memo[key]
    k = g.rank
    out: list[Path] = []

    def walk(ci: int, cur: str, acc: list[str], deg: list[int]) -> None:
        out.append(Path(v, cur, tuple(acc), tuple(deg)) if acc else g.identity(v))
        for c in range(ci, k):
            if deg[c] >= bound[c]:
                continue
            for e in g.edges_in(cur, c + 1):
                acc.append(e.id)
                deg[c] += 1
                walk(c, e.src, acc, deg)
                deg[c] -= 1
                acc.pop()

    walk(0, v, [], [0] * k)
    g._memo[key] = out
    return out


def paths_from_set(g: KGraph, X: Iterable[str], bound: Sequence[int] | None = None) -> Iterator[Path]:
    """Stream XΛ degree by degree, up to ``bound``.

    A bound is mandatory when the skeleton has a cycle, since XΛ is then
    infinite.  Acyclic skeletons default to the longest possible chain.
    """
    if bound is None:
        if g.has_cycle():
            raise BoundRequired("skeleton has a cycle; pass a degree bound")
        bound = (len(g.vertices),) * g.rank
    xs = sorted(set(X))
    for n in degrees_upto(bound):
        batch = [p for v in xs for p in enumerate_paths(g, v, n)]
        yield from sort_paths(batch)
