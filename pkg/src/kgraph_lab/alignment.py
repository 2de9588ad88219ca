"""Common extensions, exhaustive sets and the local finiteness predicates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    KGraph,
    Path,
    compose,
    degree_join,
    degree_leq,
    enumerate_paths,
    factorize,
    paths_upto,
    sort_paths,
    sub,
    zero,
)
from .errors import EWrongRange
from .verdicts import TriState


@dataclass(frozen=True)
class ExtensionPair:
    """``(alpha, beta)`` with ``λ·alpha = μ·beta``."""

    alpha: Path
    beta: Path

    def __iter__(self):
        return iter((self.alpha, self.beta))

    @property
    def literal(self) -> str:
        return f"({self.alpha.literal},{self.beta.literal})"


def _sorted_pairs(pairs: Iterable[ExtensionPair]) -> list[ExtensionPair]:
    return sorted(set(pairs), key=lambda pr: (pr.alpha.literal, pr.beta.literal))


def common_extensions(g: KGraph, lam: Path, mu: Path, n: Sequence[int]) -> list[ExtensionPair]:
    """Λ^n(λ, μ): pairs ``(α, β)`` with ``λα = μβ`` of degree ``n``.

    Computed by walking every ``α ∈ s(λ)Λ^{n - d(λ)}`` and reading off the
    degree-``d(μ)`` head of ``λα``.  Paths with different ranges have no
    common extension.
    """
    n = tuple(n)
    if lam.rng != mu.rng or not degree_leq(degree_join(lam.degree, mu.degree), n):
        return []
    key = ("ext", lam, mu, n)
    if key in g._memo:
        return g._memo[key]
    out = []
    for alpha in enumerate_paths(g, lam.src, sub(n, lam.degree)):
        head, tail = factorize(g, compose(g, lam, alpha), mu.degree)
        if head == mu:
            out.append(ExtensionPair(alpha, tail))
    out = _sorted_pairs(out)
    g._memo[key] = out
    return out


def lambda_min(g: KGraph, lam: Path, mu: Path) -> list[ExtensionPair]:
    """Λ^min(λ, μ), the minimal common extensions, as a sorted list."""
    return common_extensions(g, lam, mu, degree_join(lam.degree, mu.degree))


def meets(g: KGraph, lam: Path, mu: Path) -> bool:
    return bool(lambda_min(g, lam, mu))


def is_finitely_aligned(g: KGraph, degree_bound: Sequence[int] | None = None) -> TriState:
    if g.truncation is not None:
        return TriState.unknown(
            "windowed view of an infinite graph: pairs inside the window have finite "
            "Λ^min, but the infinite object is not certified"
        )
    return TriState.yes(
        "finite skeleton: Λ^min(λ,μ) sits inside s(λ)Λ^p × s(μ)Λ^q, a finite set"
    )


@dataclass(frozen=True)
class RowFiniteReport:
    """Sources and sinks in the convention vΛ^{e_i} = ∅ (source), Λ^{e_i}v = ∅ (sink)."""

    row_finite: bool
    sources: frozenset
    sinks: frozenset


def row_finite_report(g: KGraph) -> RowFiniteReport:
    ks = range(1, g.rank + 1)
    sources = frozenset(v for v in g.vertices if any(not g.edges_in(v, i) for i in ks))
    sinks = frozenset(v for v in g.vertices if any(not g.edges_out(v, i) for i in ks))
    return RowFiniteReport(True, sources, sinks)


def is_locally_convex(g: KGraph) -> TriState:
    """False comes with a witness ``(v, i, j, λ)``."""
    k = g.rank
    for v in sorted(g.vertices):
        for i in range(1, k + 1):
            for j in range(1, k + 1):
                if i == j or not g.edges_in(v, i) or not g.edges_in(v, j):
                    continue
                for e in g.edges_in(v, i):
                    if not g.edges_in(e.src, j):
                        return TriState.no((v, i, j, e.id), f"s({e.id})Λ^e{j} is empty")
    return TriState.yes("every vΛ^{e_i}, vΛ^{e_j} pair extends")


def default_probe(g: KGraph, reach: Sequence[int]) -> tuple[int, ...]:
    """Probe bound used when the caller gives none: ``reach`` plus a small slack."""
    slack = max(1, min(len(g.vertices), 4))
    return tuple(x + slack for x in reach)


def is_exhaustive(
    g: KGraph, E: Iterable[Path], v: str, probe_bound: Sequence[int] | None = None
) -> TriState:
    """Decide, up to ``probe_bound``, whether ``E ⊆ vΛ`` is exhaustive.

    Every ``μ ∈ vΛ`` with ``d(μ) <= probe_bound`` is tested against ``E``; a
    failing ``μ`` is a genuine counterexample and is returned as witness.
    Yes requires the bound to dominate every degree in ``E``, and is only as
    strong as the probe: a failure first appearing beyond the bound would
    go unseen, which is why the bound is echoed in the note.
    """
    E = list(E)
    for lam in E:
        if lam.rng != v:
            raise EWrongRange(f"{lam} has range {lam.rng}, not {v}")
    reach = zero(g.rank)
    for lam in E:
        reach = degree_join(reach, lam.degree)
    probe = tuple(probe_bound) if probe_bound is not None else default_probe(g, reach)
    if not degree_leq(reach, probe):
        return TriState.unknown(f"probe bound {probe} below max degree {reach} of E")
    candidates = sorted(paths_upto(g, v, probe), key=lambda p: (sum(p.degree), p.literal))
    for mu in candidates:
        if not any(meets(g, lam, mu) for lam in E):
            return TriState.no(mu, f"Λ^min(λ,{mu.literal}) = ∅ for every λ in E")
    return TriState.yes(f"every μ in {v}Λ with d(μ) <= {probe} meets E")


def boundary_paths(g: KGraph, v: str, n: Sequence[int]) -> list[Path]:
    """vΛ^{≤n}: paths of degree ≤ n that cannot be extended where they fall short."""
    n = tuple(n)
    out = []
    for lam in paths_upto(g, v, n):
        if all(d == m or not g.edges_in(lam.src, i) for i, (d, m) in enumerate(zip(lam.degree, n), start=1)):
            out.append(lam)
    return sort_paths(out)


def find_finite_exhaustive(
    g: KGraph,
    v: str,
    target: Iterable[str] | None = None,
    n_max: int = 6,
    probe_bound: Sequence[int] | None = None,
) -> list[Path] | None:
    """Search for a finite exhaustive ``E ⊆ vΛ·target``.

    Candidates are ``{λ ∈ vΛ^{≤(n,…,n)} : s(λ) ∈ target}`` for ``n = 1..n_max``
    (all of ``vΛ^{≤(n,…,n)}`` when ``target`` is None).  ``None`` means
    nothing was found within the bound, not that no such set exists.
    """
    tgt = None if target is None else frozenset(target)
    for n in range(1, n_max + 1):
        deg = (n,) * g.rank
        E = [lam for lam in boundary_paths(g, v, deg) if tgt is None or lam.src in tgt]
        if not E:
            continue
        if is_exhaustive(g, E, v, probe_bound).is_yes:
            return E
    return None
