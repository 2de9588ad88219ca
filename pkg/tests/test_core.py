from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from kgraph_lab.core import (
    Edge,
    KGraph,
    Square,
    check_kgraph,
    compose,
    degree_join,
    degree_leq,
    degree_meet,
    degrees_upto,
    enumerate_paths,
    factorize,
    normalize,
    paths_from_set,
    paths_upto,
    paths_with_source,
    reorder,
    segment,
    validate_kgraph,
)
from kgraph_lab.errors import (
    BoundRequired,
    DegreeOutOfRange,
    NotComposable,
    RankMismatch,
    UnknownId,
    ValidationError,
)
from kgraph_lab.fixtures import b2, fixtures, lc_minus, line, t2, t2_missing_square
from kgraph_lab.constructions import omega_window

from oracles import Oracle


def test_t2_valid_and_missing_square():
    assert check_kgraph(t2()).ok
    rep = check_kgraph(t2_missing_square())
    assert not rep.ok
    assert str(rep.violations[0]) == "MissingSquare(e,f)"
    with pytest.raises(ValidationError) as exc:
        validate_kgraph(t2_missing_square())
    assert "MissingSquare" in exc.value.report.kinds()


def test_lc_minus_valid_without_squares():
    assert check_kgraph(lc_minus()).ok


def test_bad_incidence_and_duplicate_square():
    g = KGraph(1, ["v"], [Edge("a", 1, "v", "x")])
    assert "BadIncidence" in check_kgraph(g).kinds()
    g = KGraph(
        2,
        ["v"],
        [Edge("e", 1, "v", "v"), Edge("f", 2, "v", "v")],
        [Square("e", "f", "f", "e"), Square("e", "f", "f", "e")],
    )
    assert "DuplicateSquare" in check_kgraph(g).kinds()


_PAIRS = [(i, j) for i in (0, 1) for j in (0, 1)]


def _one_vertex_3graph(faces) -> KGraph:
    """Rank 3, one vertex, two loops per colour; ``faces[(c, d)]`` permutes index pairs."""
    edges = [Edge(f"{c}{i}", n, "v", "v") for n, c in enumerate("xyz", start=1) for i in (0, 1)]
    sq = []
    for (c, d), perm in faces.items():
        for (i, j), (i2, j2) in zip(_PAIRS, perm):
            sq.append(Square(f"{c}{i}", f"{d}{j}", f"{d}{j2}", f"{c}{i2}"))
    return KGraph(3, ["v"], edges, sq)


def _unique_factorisation(g) -> bool:
    o = Oracle(g)
    for seq in o.sequences("v", 3):
        if sorted(o.colour[e] for e in seq) != [1, 2, 3]:
            continue
        words = [tuple(o.colour[e] for e in s) for s in o.class_of(seq)]
        if len(words) != len(set(words)):
            return False
    return True


def test_cube_condition_matches_oracle():
    perms = list(itertools.permutations(_PAIRS))
    ident = tuple(_PAIRS)
    flagged = 0
    for pxy in perms:
        for pyz in perms[::3]:
            g = _one_vertex_3graph({("x", "y"): pxy, ("x", "z"): ident, ("y", "z"): pyz})
            kinds = check_kgraph(g).kinds()
            assert kinds <= {"CubeViolation"}
            assert (not kinds) == _unique_factorisation(g), (pxy, pyz)
            flagged += bool(kinds)
    assert flagged  # the search does hit genuine violations


def test_degree_helpers():
    assert degree_join((1, 0), (0, 2)) == (1, 2)
    assert degree_meet((1, 0), (0, 2)) == (0, 0)
    assert not degree_leq((1, 1), (1, 0))
    with pytest.raises(RankMismatch):
        degree_join((1,), (1, 2))
    assert degrees_upto((1, 1)) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_compose_and_factorize_t2():
    g = t2()
    e, f = g.parse_path("e"), g.parse_path("f")
    ef = compose(g, e, f)
    assert ef.edges == ("e", "f") and ef.degree == (1, 1)
    assert compose(g, f, e) == ef
    assert compose(g, ef, g.identity("v")) == ef
    assert factorize(g, ef, (0, 1)) == (f, e)
    assert factorize(g, ef, (1, 1)) == (ef, g.identity("v"))
    assert factorize(g, ef, (0, 0)) == (g.identity("v"), ef)
    with pytest.raises(DegreeOutOfRange):
        factorize(g, ef, (2, 0))


def test_compose_errors():
    g = line()
    with pytest.raises(NotComposable):
        compose(g, g.parse_path("a"), g.identity("u"))
    with pytest.raises(UnknownId):
        g.parse_path("nope")


def test_enumeration_examples():
    assert len(enumerate_paths(b2(), "v", (3,))) == 8
    assert [p.edges for p in enumerate_paths(t2(), "v", (1, 1))] == [("e", "f")]
    assert enumerate_paths(line(), "w", (1,)) == []
    assert paths_with_source(line(), "u", (1,)) == []
    assert {p.literal for p in paths_from_set(line(), ["u"], (1,))} == {"u", "a"}
    assert {p.literal for p in paths_from_set(b2(), ["v"], (1,))} == {"v", "a", "b"}


def test_paths_from_set_needs_bound_on_cycles():
    with pytest.raises(BoundRequired):
        list(paths_from_set(b2(), ["v"]))
    # acyclic skeletons get a default bound
    assert len(list(paths_from_set(line(), ["u"]))) == 2


def test_paths_from_set_increasing_degree():
    degs = [sum(p.degree) for p in paths_from_set(omega_window(2, 2), ["(0,0)"], (2, 2))]
    assert degs == sorted(degs)


def test_segment():
    g = t2()
    p = g.path(["e", "e", "f"])
    assert segment(g, p, (1, 0), (2, 1)).edges == ("e", "f")


def test_vertex_literal_and_ids():
    g = b2()
    assert g.identity("v").literal == "v"
    assert g.parse_path("a.b").literal == "a.b"


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["T2", "B2", "C1", "LC-", "Omega2[0..2]", "Delta2[-2..2]"]), st.integers(0, 10_000))
def test_random_rewrite_order_reaches_normal_form(name, seed):
    g = fixtures()[name]
    r = random.Random(seed)
    paths = [p for v in g.vertices for p in paths_upto(g, v, (2,) * g.rank) if len(p.edges) > 1]
    if not paths:
        return
    p = r.choice(paths)
    word = [g.color(e) for e in p.edges]
    r.shuffle(word)
    scrambled = reorder(g, list(p.edges), word)
    assert sorted(g.color(e) for e in scrambled) == sorted(word)
    assert tuple(normalize(g, scrambled, r)) == p.edges


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["T2", "B2", "Omega2[0..2]", "Delta2[-2..2]"]), st.data())
def test_factorize_then_compose_roundtrip(name, data):
    g = fixtures()[name]
    paths = [p for v in g.vertices for p in paths_upto(g, v, (2,) * g.rank)]
    p = data.draw(st.sampled_from(paths))
    m = data.draw(st.sampled_from(degrees_upto(p.degree)))
    h, t = factorize(g, p, m)
    assert h.degree == m and compose(g, h, t) == p
