"""Formal span of the generators T_{α,β} and the finite closure of core sets.

Elements are finite rational combinations of generators.  Products follow
``T_{α,β} T_{λ,μ} = Σ_{(β',λ') ∈ Λ^min(β,λ)} T_{αβ', μλ'}``; the third
Cuntz–Krieger relation is only expanded for inspection, never imposed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .alignment import common_extensions, is_exhaustive, lambda_min
from .core import (
    KGraph,
    Path,
    compose,
    degree_join,
    degree_leq,
    degrees_upto,
    factorize,
    sort_paths,
    split_top,
    sub,
    zero,
)
from .errors import KGraphError, NotCoreGraded, NotExhaustive


@dataclass(frozen=True, order=False)
class Generator:
    alpha: Path
    beta: Path

    def __post_init__(self):
        if self.alpha.src != self.beta.src:
            raise KGraphError(f"T({self.alpha}|{self.beta}): sources differ")

    @property
    def literal(self) -> str:
        return f"T({self.alpha.literal}|{self.beta.literal})"

    @property
    def degree(self) -> tuple[int, ...]:
        return sub(self.alpha.degree, self.beta.degree)

    @property
    def is_core(self) -> bool:
        return self.alpha.degree == self.beta.degree

    def adjoint(self) -> "Generator":
        return Generator(self.beta, self.alpha)

    def key(self):
        return (sum(self.alpha.degree) + sum(self.beta.degree), self.alpha.literal, self.beta.literal)

    def __str__(self) -> str:
        return self.literal


def vertex_generator(g: KGraph, v: str) -> Generator:
    p = g.identity(v)
    return Generator(p, p)


def projection(lam: Path) -> Generator:
    """T_λ = T_{λ,λ}."""
    return Generator(lam, lam)


def parse_generator(g: KGraph, text: str) -> Generator:
    """Read ``T(alpha|beta)``, ``T(alpha,beta)`` or ``T(lambda)``."""
    t = text.strip()
    if not (t.startswith("T(") and t.endswith(")")):
        raise KGraphError(f"not a generator literal: {text!r}")
    body = t[2:-1]
    parts = split_top(body, "|")
    if len(parts) == 1:
        parts = split_top(body, ",")
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2:
        raise KGraphError(f"not a generator literal: {text!r}")
    return Generator(g.parse_path(parts[0]), g.parse_path(parts[1]))


class FormalElement(Mapping):
    """An immutable finite combination ``Σ c_i T_{α_i,β_i}`` with exact coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Generator, Fraction] | Iterable[tuple[Generator, Fraction]] = ()):
        acc: dict[Generator, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for gen, c in items:
            acc[gen] = acc.get(gen, Fraction(0)) + Fraction(c)
        self._terms = {gen: acc[gen] for gen in sorted(acc, key=Generator.key) if acc[gen] != 0}
        self._hash = None

    @classmethod
    def of(cls, gen: Generator, coeff=1) -> "FormalElement":
        return cls([(gen, Fraction(coeff))])

    def __getitem__(self, gen: Generator) -> Fraction:
        return self._terms[gen]

    def __iter__(self) -> Iterator[Generator]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, FormalElement):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other: "FormalElement") -> "FormalElement":
        return FormalElement(list(self._terms.items()) + list(other._terms.items()))

    def __neg__(self) -> "FormalElement":
        return FormalElement((g, -c) for g, c in self._terms.items())

    def __sub__(self, other: "FormalElement") -> "FormalElement":
        return self + (-other)

    def scale(self, c) -> "FormalElement":
        return FormalElement((g, c * v) for g, v in self._terms.items())

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for gen, c in self._terms.items():
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            coef = "" if mag == 1 else f"{mag}*"
            out.append(f"{sign} {coef}{gen.literal}")
        text = " ".join(out)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    __repr__ = __str__

    def to_json(self) -> dict[str, str]:
        return {gen.literal: str(c) for gen, c in self._terms.items()}


ZERO = FormalElement()


def _admit(gen: Generator, X: frozenset | None) -> None:
    if X is not None and (gen.alpha.rng not in X or gen.beta.rng not in X):
        raise KGraphError(f"{gen.literal}: ranges must lie in X")


def adjoint(x: FormalElement) -> FormalElement:
    # rational coefficients are their own conjugates
    return FormalElement((gen.adjoint(), c) for gen, c in x.items())


def multiply_generators(g: KGraph, s: Generator, t: Generator) -> FormalElement:
    key = ("T*T", s, t)
    if key in g._memo:
        return g._memo[key]
    terms = []
    for beta_ext, lam_ext in lambda_min(g, s.beta, t.alpha):
        terms.append((Generator(compose(g, s.alpha, beta_ext), compose(g, t.beta, lam_ext)), Fraction(1)))
    out = FormalElement(terms)
    g._memo[key] = out
    return out


def multiply(x: FormalElement, y: FormalElement, g: KGraph, X: Iterable[str] | None = None) -> FormalElement:
    Xs = None if X is None else frozenset(X)
    terms: list[tuple[Generator, Fraction]] = []
    for s, a in x.items():
        _admit(s, Xs)
        for t, b in y.items():
            _admit(t, Xs)
            for gen, c in multiply_generators(g, s, t).items():
                terms.append((gen, a * b * c))
    return FormalElement(terms)


def expand_ck3(g: KGraph, v: str, E: Sequence[Path], X: Iterable[str] | None = None) -> FormalElement:
    """Expand ``Π_{λ∈E}(T_v − T_λ)``.  The result is a relation, i.e. zero in the quotient."""
    E = sort_paths(set(E))
    verdict = is_exhaustive(g, E, v)
    if not verdict.is_yes:
        raise NotExhaustive(f"E is not exhaustive at {v}: {verdict.note}")
    tv = FormalElement.of(vertex_generator(g, v))
    out = tv
    for lam in E:
        out = multiply(out, tv - FormalElement.of(projection(lam)), g, X)
    return out


def grading(x: FormalElement) -> tuple[int, ...] | None:
    """The common ``d(α) − d(β)`` of a homogeneous element; None when mixed or zero."""
    degs = {gen.degree for gen in x}
    return degs.pop() if len(degs) == 1 else None


def core_filter(x: FormalElement) -> FormalElement:
    return FormalElement((gen, c) for gen, c in x.items() if gen.is_core)


# ---------------------------------------------------------------------------
# finite closure of a core set


@dataclass(frozen=True)
class ClosureSet:
    Lambda_F: tuple[Path, ...]
    Lambda_leq_F: tuple[Path, ...]
    N: tuple[int, ...]
    Lambda_NF: tuple[Path, ...]
    Fbar: tuple[Generator, ...]

    @property
    def dimension(self) -> int:
        return len(self.Fbar)


def initial_subpaths(g: KGraph, lam: Path) -> list[Path]:
    """Heads of every factorisation of ``λ``, from the range vertex up to ``λ`` itself."""
    return sort_paths({factorize(g, lam, m)[0] for m in degrees_upto(lam.degree)})


def closure_of(g: KGraph, F: Iterable[Generator], X: Iterable[str] | None = None) -> ClosureSet:
    """The finite core set F̄ ⊇ F whose span is closed under products.

    Λ(N,F) collects the paths ``λμ`` with ``λ, ν ∈ Λ(≤F)`` and
    ``(μ, ·) ∈ Λ^n(λ, ν)`` for some ``n ≤ N``, where N joins the degrees in
    Λ(F).  Extensions of degree exactly ``d(λ)`` (so ``μ`` an identity) are
    included.
    """
    F = sorted(set(F), key=Generator.key)
    Xs = None if X is None else frozenset(X)
    for gen in F:
        if not gen.is_core:
            raise NotCoreGraded(f"{gen.literal} has grading {gen.degree}")
        _admit(gen, Xs)
    lam_F = sort_paths({p for gen in F for p in (gen.alpha, gen.beta)})
    N = zero(g.rank)
    for p in lam_F:
        N = degree_join(N, p.degree)
    leq = sort_paths({q for p in lam_F for q in initial_subpaths(g, p)})

    nf: set[Path] = set()
    for lam in leq:
        for nu in leq:
            if nu.rng != lam.rng:
                continue
            for n in degrees_upto(N):
                if not degree_leq(degree_join(lam.degree, nu.degree), n):
                    continue
                for mu, _ in common_extensions(g, lam, nu, n):
                    nf.add(compose(g, lam, mu))
    nf_sorted = sort_paths(nf)

    by_key: dict[tuple, list[Path]] = {}
    for p in nf_sorted:
        by_key.setdefault((p.src, p.degree), []).append(p)
    fbar = [Generator(a, b) for group in by_key.values() for a in group for b in group]
    fbar.sort(key=Generator.key)
    return ClosureSet(tuple(lam_F), tuple(leq), N, tuple(nf_sorted), tuple(fbar))


@dataclass(frozen=True)
class SpanCheck:
    closed: bool
    structure_constants: dict[tuple[str, str], dict[str, int]] = field(default_factory=dict)
    defects: tuple[str, ...] = ()

    def to_json(self) -> dict:
        table = {f"{a}*{b}": dict(v) for (a, b), v in self.structure_constants.items()}
        return {"closed": self.closed, "structure_constants": table, "defects": list(self.defects)}


def verify_span_closed(g: KGraph, C: ClosureSet, X: Iterable[str] | None = None) -> SpanCheck:
    """Multiply every ordered pair in F̄ and check the product stays in span F̄."""
    members = set(C.Fbar)
    table: dict[tuple[str, str], dict[str, int]] = {}
    defects = []
    Xs = None if X is None else frozenset(X)
    for s in C.Fbar:
        _admit(s, Xs)
    for s in C.Fbar:
        for t in C.Fbar:
            prod = multiply_generators(g, s, t)
            row = {}
            for gen, c in prod.items():
                if gen not in members:
                    defects.append(f"{s.literal}*{t.literal} -> {gen.literal}")
                if c.denominator != 1:
                    defects.append(f"{s.literal}*{t.literal}: non-integer constant {c}")
                row[gen.literal] = int(c) if c.denominator == 1 else c
            if row:
                table[(s.literal, t.literal)] = row
    return SpanCheck(not defects, table, tuple(defects))
