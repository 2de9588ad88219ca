"""Saturations, stranded vertices and the corner-level decisions.

Every search here is bounded.  Results carry a ``complete`` flag or a
three-valued :class:`~kgraph_lab.verdicts.TriState`; a bound running out
degrades the answer to Unknown instead of guessing.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .alignment import find_finite_exhaustive, row_finite_report
from .core import (
    KGraph,
    Path,
    Truncation,
    colour_word,
    enumerate_paths,
    segment,
    validate_kgraph,
)
from .verdicts import TriState, Verdict


@dataclass(frozen=True)
class SaturationResult:
    closure: frozenset
    hereditary_stage: frozenset
    rounds: int
    complete: bool
    undecided: frozenset = frozenset()
    exhaustive_sets: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class StrandedResult:
    stages: tuple
    stranded: frozenset
    essential_vertices: frozenset
    direct: frozenset
    window_aware: bool

    @property
    def disagreements(self) -> frozenset:
        """Vertices where the recursion and the direct definition differ."""
        return self.stranded ^ self.direct


def _forward(g: KGraph, start: Iterable[str]) -> set[str]:
    """Sources of paths whose range lies in ``start``."""
    seen = set(start)
    todo = deque(seen)
    while todo:
        v = todo.popleft()
        for c in range(1, g.rank + 1):
            for e in g.edges_in(v, c):
                if e.src not in seen:
                    seen.add(e.src)
                    todo.append(e.src)
    return seen


def _backward(g: KGraph, start: Iterable[str]) -> set[str]:
    """Ranges of paths whose source lies in ``start``."""
    seen = set(start)
    todo = deque(seen)
    while todo:
        v = todo.popleft()
        for c in range(1, g.rank + 1):
            for e in g.edges_out(v, c):
                if e.rng not in seen:
                    seen.add(e.rng)
                    todo.append(e.rng)
    return seen


def hereditary_closure(g: KGraph, V: Iterable[str], degree_bound: Sequence[int] | None = None) -> frozenset:
    """Smallest hereditary set containing ``V``.

    Equals forward reachability along edges, range to source.  The bound is
    accepted for interface symmetry; materialised windows are finite.
    """
    return frozenset(_forward(g, V))


def _refuted(g: KGraph, S: frozenset) -> set[str]:
    """Vertices outside ``S`` that provably admit no finite exhaustive set into ``S``.

    ``S`` must be hereditary.  A vertex is refuted when it reaches either a
    vertex from which ``S`` is unreachable, or a set ``R`` outside ``S`` in
    which every vertex has edges of every colour staying inside ``R``: in
    both cases some path from the vertex can be extended past any finite
    ``E`` without ever entering ``S``.
    """
    outside = set(g.vertices) - S
    dead = outside - _backward(g, S)
    R = set(outside)
    changed = True
    while changed:
        changed = False
        for w in sorted(R):
            if any(not any(e.src in R for e in g.edges_in(w, c)) for c in range(1, g.rank + 1)):
                R.discard(w)
                changed = True
    return _backward(g, dead | R) & outside


def saturation(g: KGraph, V: Iterable[str], n_max: int = 6, probe_bound: Sequence[int] | None = None) -> SaturationResult:
    """Σ(V): alternate hereditary closure with the saturation rule to a fixed point."""
    V = frozenset(V)
    H = hereditary_closure(g, V)
    S = H
    rounds = 0
    witnesses: dict = {}
    while True:
        rounds += 1
        added = []
        for v in sorted(set(g.vertices) - S):
            E = find_finite_exhaustive(g, v, S, n_max, probe_bound)
            if E is not None:
                added.append(v)
                witnesses[v] = E
        if not added:
            break
        S = hereditary_closure(g, S | set(added))
    undecided = frozenset(set(g.vertices) - S - _refuted(g, S))
    return SaturationResult(S, H, rounds, not undecided, undecided, witnesses)


def is_full_corner(g: KGraph, X: Iterable[str], n_max: int = 6) -> TriState:
    """The corner at X is full iff Σ(X) is every vertex."""
    res = saturation(g, X, n_max)
    everything = frozenset(g.vertices)
    if res.closure == everything:
        return TriState.yes(f"Σ(X) = Λ^0 (n_max={n_max})", sorted(res.closure))
    missing = sorted(everything - res.closure)
    if res.complete:
        return TriState.no(missing[0], f"Σ(X) misses {len(missing)} vertices (n_max={n_max})")
    return TriState.unknown(f"saturation incomplete at n_max={n_max}; undecided {sorted(res.undecided)}")


def morita_corners(g: KGraph, X: Iterable[str], Y: Iterable[str], n_max: int = 6) -> TriState:
    """Sufficient test Σ(X) = Σ(Y) for Morita equivalence of the two corners."""
    rx, ry = saturation(g, X, n_max), saturation(g, Y, n_max)
    closures = {"X": sorted(rx.closure), "Y": sorted(ry.closure)}
    note = "criterion Σ(X)=Σ(Y) is sufficient; it is not claimed necessary"
    if not (rx.complete and ry.complete):
        if rx.closure == ry.closure == frozenset(g.vertices):
            return TriState.yes(note, closures)
        return TriState.unknown(f"saturation incomplete at n_max={n_max}; {note}", closures)
    if rx.closure == ry.closure:
        return TriState.yes(note, closures)
    return TriState.no(closures, f"closures differ; {note}")


# ---------------------------------------------------------------------------
# stranded vertices


def _slots(g: KGraph, window_aware: bool) -> Truncation:
    if window_aware and g.truncation is not None:
        return g.truncation
    return Truncation()


def _stranded_recursion(g: KGraph, trunc: Truncation, max_rounds: int | None) -> list[frozenset]:
    ks = range(1, g.rank + 1)

    def range_closed(v, i, S):
        return (v, i) not in trunc.open_range and all(e.src in S for e in g.edges_in(v, i))

    def source_closed(v, i, S):
        return (v, i) not in trunc.open_source and all(e.rng in S for e in g.edges_out(v, i))

    empty: frozenset = frozenset()
    S = frozenset(v for v in g.vertices if any(range_closed(v, i, empty) or source_closed(v, i, empty) for i in ks))
    stages = [S]
    while max_rounds is None or len(stages) <= max_rounds:
        nxt = S | {v for v in g.vertices if any(range_closed(v, i, S) or source_closed(v, i, S) for i in ks)}
        if nxt == S:
            break
        S = frozenset(nxt)
        stages.append(S)
    return stages


def _has_paths(g: KGraph, v: str, n: Sequence[int], trunc: Truncation, towards_source: bool) -> bool:
    """Whether vΛ^n (or Λ^n v) is nonempty, counting exits through the window."""
    word = colour_word(n)
    if not towards_source:
        word = word[::-1]
    current = {v}
    for c in word:
        if towards_source:
            if any((w, c) in trunc.open_range for w in current):
                return True
            current = {e.src for w in current for e in g.edges_in(w, c)}
        else:
            if any((w, c) in trunc.open_source for w in current):
                return True
            current = {e.rng for w in current for e in g.edges_out(w, c)}
        if not current:
            return False
    return True


def stranded_direct(g: KGraph, probe: int | None = None, window_aware: bool = True) -> frozenset:
    """Vertices with vΛ^n = ∅ or Λ^n v = ∅ for some n, probed at ``n = (probe,…,probe)``.

    Both sets shrink as ``n`` grows, so probing the top degree suffices.
    The default probe is ``|Λ^0|·k``.
    """
    trunc = _slots(g, window_aware)
    N = probe if probe is not None else len(g.vertices) * g.rank
    n = (N,) * g.rank
    return frozenset(
        v for v in g.vertices
        if not _has_paths(g, v, n, trunc, True) or not _has_paths(g, v, n, trunc, False)
    )


def stranded_vertices(g: KGraph, n_max_rounds: int | None = None, window_aware: bool = True) -> StrandedResult:
    """Run the S_0 ⊆ S_1 ⊆ … peeling recursion and cross-check it.

    S_0 is every sink and source; each round adds the vertices all of whose
    colour-``i`` edges (on the range side, or on the source side) touch the
    previous stage.  For windowed graphs with ``window_aware`` set, edges cut
    off by the window count as leading to non-stranded vertices.
    """
    trunc = _slots(g, window_aware)
    stages = _stranded_recursion(g, trunc, n_max_rounds)
    stranded = stages[-1]
    direct = stranded_direct(g, window_aware=window_aware)
    return StrandedResult(
        tuple(stages),
        stranded,
        frozenset(g.vertices) - stranded,
        direct,
        window_aware and g.truncation is not None,
    )


def essential_subgraph(g: KGraph, window_aware: bool = True) -> KGraph:
    """The largest subgraph with no sinks or sources, re-validated.

    On windowed graphs the truncation slots of surviving vertices are kept,
    so boundary-affected vertices stay flagged.
    """
    keep = stranded_vertices(g, window_aware=window_aware).essential_vertices
    edges = [e for e in g.edges if e.src in keep and e.rng in keep]
    ids = {e.id for e in edges}
    squares = [sq for sq in g.squares if {sq.e, sq.f, sq.f2, sq.e2} <= ids]
    trunc = None
    notes = []
    if g.truncation is not None:
        trunc = Truncation(
            frozenset(s for s in g.truncation.open_range if s[0] in keep),
            frozenset(s for s in g.truncation.open_source if s[0] in keep),
        )
        if window_aware:
            notes.append("window-aware: edges cut by the window are treated as present")
        notes.append(f"boundary-affected vertices: {sorted(trunc.vertices)}")
    sub = KGraph(
        g.rank,
        [v for v in g.vertices if v in keep],
        edges,
        squares,
        name=f"{g.name}-ess" if g.name else "ess",
        truncation=trunc,
        window=g.window,
        notes=notes,
    )
    return validate_kgraph(sub)


def is_essentially_saturated(g: KGraph, n_max: int | None = None) -> TriState:
    """Every vertex reaches the essential subgraph by a path."""
    ess = stranded_vertices(g).essential_vertices
    if not ess:
        return TriState.no(sorted(g.vertices)[0] if g.vertices else None, "essential subgraph is empty")
    reaches = _backward(g, ess)
    for v in sorted(g.vertices):
        if v not in reaches:
            return TriState.no(v, f"{v} reaches no essential vertex")
    return TriState.yes(f"every vertex reaches eΛ^0 = {sorted(ess)}")


def is_finitely_exhaustive(g: KGraph, n_max: int = 6, shortcut: bool = True) -> TriState:
    """Every vertex has a finite exhaustive set."""
    if shortcut and row_finite_report(g).row_finite:
        return TriState.yes("row finite, hence finitely exhaustive")
    missing = [v for v in sorted(g.vertices) if find_finite_exhaustive(g, v, None, n_max) is None]
    if not missing:
        return TriState.yes(f"exhaustive set found at every vertex within n_max={n_max}")
    return TriState.unknown(f"no exhaustive set found within n_max={n_max}", missing[0])


def is_relatively_cofinal(g: KGraph, X: Iterable[str], n_max: int = 6) -> TriState:
    """Σ({v}) = Σ(X) for every v in X."""
    X = sorted(set(X))
    whole = saturation(g, X, n_max)
    singles = {v: saturation(g, [v], n_max) for v in X}
    if whole.complete and all(r.complete for r in singles.values()):
        for v, r in singles.items():
            if r.closure != whole.closure:
                return TriState.no(v, f"Σ({{{v}}}) = {sorted(r.closure)} ≠ Σ(X) = {sorted(whole.closure)}")
        return TriState.yes(f"Σ({{v}}) = Σ(X) = {sorted(whole.closure)} for all v in X")
    if all(r.closure == frozenset(g.vertices) for r in singles.values()):
        return TriState.yes("every Σ({v}) is already Λ^0")
    return TriState.unknown(f"saturation incomplete at n_max={n_max}")


def is_cofinal(g: KGraph, n_max: int = 6) -> TriState:
    """Σ({v}) = Λ^0 for every vertex."""
    for v in sorted(g.vertices):
        t = is_full_corner(g, [v], n_max)
        if not t.is_yes:
            return TriState(t.value, v, t.note)
    return TriState.yes("Σ({v}) = Λ^0 for every vertex")


# ---------------------------------------------------------------------------
# aperiodicity


def _shift_parts(p: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return tuple(max(x, 0) for x in p), tuple(max(-x, 0) for x in p)


def _violates(g: KGraph, lam: Path, plus: tuple, minus: tuple) -> bool:
    """λ(plus, plus+t) ≠ λ(minus, minus+t) for the largest available t."""
    top = tuple(max(a, b) for a, b in zip(plus, minus))
    t = tuple(d - m for d, m in zip(lam.degree, top))
    if any(x < 0 for x in t):
        return False
    one = segment(g, lam, plus, tuple(a + b for a, b in zip(plus, t)))
    two = segment(g, lam, minus, tuple(a + b for a, b in zip(minus, t)))
    return one != two


def aperiodicity_check(g: KGraph, v: str, p_bound: int = 4, len_bound: int | None = None) -> TriState:
    """Bounded search for an aperiodic infinite path at ``v``.

    For every vertex ``w`` reachable from ``v`` and every nonzero shift ``p``
    with ``|p_i| <= p_bound``, look for a path in ``wΛ`` of degree
    ``(len_bound,…,len_bound)`` whose two segments offset by ``p`` differ.
    If all searches succeed, such disagreements can be chained into an
    aperiodic path and the answer is Yes (up to the shift bound).  If some
    shift never disagrees the path space looks periodic; this is reported as
    Unknown with the offending ``(w, p)`` as witness, since a finite search
    cannot certify periodicity.
    """
    report = row_finite_report(g)
    if report.sources:
        return TriState.unknown(f"graph has sources {sorted(report.sources)}; check needs no sources")
    L = len_bound if len_bound is not None else p_bound + 2
    k = g.rank
    shifts = []
    for p in itertools.product(range(-p_bound, p_bound + 1), repeat=k):
        if any(p) and p > tuple(-x for x in p):
            shifts.append(p)
    reachable = sorted(_forward(g, [v]))
    top = (L,) * k
    for w in reachable:
        paths = enumerate_paths(g, w, top)
        for p in shifts:
            plus, minus = _shift_parts(p)
            if not any(_violates(g, lam, plus, minus) for lam in paths):
                return TriState.unknown(
                    f"periodic up to bound: no disagreement for shift {p} at {w} "
                    f"(len_bound={L}, p_bound={p_bound})",
                    {"vertex": w, "shift": list(p)},
                )
    return TriState.yes(
        f"every reachable vertex has disagreements for every shift with |p_i| <= {p_bound} "
        f"within degree {top}; chaining them gives an aperiodic path"
    )


@dataclass(frozen=True)
class SimplicityDecision:
    verdict: str
    reasons: tuple
    premises: dict = field(compare=False, default_factory=dict)


def simplicity_decision(
    g: KGraph, X: Iterable[str], n_max: int = 6, p_bound: int = 4, len_bound: int | None = None
) -> SimplicityDecision:
    """Decide simplicity of the corner at X for row-finite graphs.

    Simple needs row finiteness, relative aperiodicity of X and relative
    cofinality of X.  With aperiodicity established, failure of cofinality
    gives NotSimple.  Any other gap leaves the answer Unknown.  The
    alternative route through "all ideals are gauge invariant" has no
    combinatorial test and is never assumed.
    """
    X = sorted(set(X))
    reasons = []
    premises: dict = {}
    row_finite = row_finite_report(g).row_finite
    premises["row_finite"] = TriState.yes("finite skeleton") if row_finite else TriState.unknown()
    aper = {v: aperiodicity_check(g, v, p_bound, len_bound) for v in X}
    aperiodic = all(t.is_yes for t in aper.values())
    premises["relatively_aperiodic"] = (
        TriState.yes("aperiodic path found at every vertex of X")
        if aperiodic
        else TriState.unknown("; ".join(f"{v}: {t.note}" for v, t in aper.items() if not t.is_yes))
    )
    cof = is_relatively_cofinal(g, X, n_max)
    premises["relatively_cofinal"] = cof
    premises["all_ideals_gauge_invariant"] = TriState.unknown("no combinatorial test; not assumed")

    if not aperiodic:
        reasons.append("relative aperiodicity not established")
    if cof.value is Verdict.UNKNOWN:
        reasons.append("relative cofinality undecided within bounds")
    if aperiodic and row_finite and cof.is_yes:
        return SimplicityDecision("Simple", ("row finite, relatively aperiodic and relatively cofinal",), premises)
    if aperiodic and row_finite and cof.is_no:
        return SimplicityDecision("NotSimple", (f"X is not relatively cofinal: {cof.note}",), premises)
    reasons.append("gauge-invariance of all ideals is not checkable and was not assumed")
    return SimplicityDecision("Unknown", tuple(reasons), premises)
