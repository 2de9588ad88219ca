from __future__ import annotations

from hypothesis import given, settings, strategies as st

from kgraph_lab.closure import (
    aperiodicity_check,
    essential_subgraph,
    hereditary_closure,
    is_cofinal,
    is_essentially_saturated,
    is_finitely_exhaustive,
    is_full_corner,
    is_relatively_cofinal,
    morita_corners,
    saturation,
    stranded_vertices,
)
from kgraph_lab.constructions import delta_window, omega_window
from kgraph_lab.core import check_kgraph
from kgraph_lab.fixtures import b2, b2_disjoint, b2_tail, c1, fixtures, line, t2


def test_hereditary_closure():
    assert hereditary_closure(line(), ["u"]) == {"u", "w"}
    assert hereditary_closure(line(), ["w"]) == {"w"}
    assert hereditary_closure(b2(), ["v"]) == {"v"}


def test_saturation_examples():
    r = saturation(line(), ["w"], n_max=1)
    assert r.closure == {"u", "w"} and r.complete
    assert [p.literal for p in r.exhaustive_sets["u"]] == ["a"]
    assert saturation(b2(), ["v"]).closure == {"v"}
    g = delta_window(1, 3)
    r = saturation(g, ["(0)", "(1)", "(2)", "(3)"])
    assert r.closure == frozenset(g.vertices) and r.complete


def test_saturation_does_not_cross_components():
    r = saturation(b2_disjoint(), ["v"])
    assert r.closure == {"v"} and r.complete


def test_full_corner():
    assert is_full_corner(line(), ["w"]).is_yes
    t = is_full_corner(b2_disjoint(), ["v"])
    assert t.is_no and t.witness == "v'"
    assert is_full_corner(b2(), ["v"]).is_yes


def test_morita():
    assert morita_corners(line(), ["w"], ["u"]).is_yes
    assert morita_corners(b2_disjoint(), ["v"], ["v'"]).is_no
    assert morita_corners(b2_disjoint(), ["v"], ["v"]).is_yes


def test_stranded_examples():
    r = stranded_vertices(line())
    assert [set(s) for s in r.stages] == [{"u", "w"}]
    assert r.stranded == {"u", "w"} and not r.essential_vertices
    assert not stranded_vertices(b2()).stranded
    g = omega_window(1, 3)
    assert stranded_vertices(g).stranded == frozenset(g.vertices)


def test_literal_mode_on_windows():
    # ignoring the window cuts, boundary vertices look like sources/sinks
    g = delta_window(1, 2)
    lit = stranded_vertices(g, window_aware=False)
    assert lit.stranded == frozenset(g.vertices)
    assert not stranded_vertices(g).stranded


def test_essential_subgraph():
    g = essential_subgraph(b2())
    assert g.vertices == b2().vertices and len(g.edges) == 2
    assert essential_subgraph(line()).vertices == ()
    d = delta_window(1, 2)
    e = essential_subgraph(d)
    assert set(e.vertices) == set(d.vertices)
    assert e.truncation is not None and e.notes
    h = essential_subgraph(b2_tail())
    assert h.vertices == ("v",) and check_kgraph(h).ok


def test_essentially_saturated():
    assert is_essentially_saturated(b2_tail()).is_yes
    assert is_essentially_saturated(line()).is_no
    assert is_essentially_saturated(b2()).is_yes


def test_finitely_exhaustive():
    for g in (b2(), line(), t2(), c1()):
        assert is_finitely_exhaustive(g).is_yes
    # the search route agrees where the shortcut applies
    assert is_finitely_exhaustive(b2(), shortcut=False).is_yes


def test_relative_cofinality():
    assert is_relatively_cofinal(b2(), ["v"]).is_yes
    assert is_relatively_cofinal(b2_disjoint(), ["v", "v'"]).is_no
    assert is_relatively_cofinal(line(), ["u", "w"]).is_yes
    assert is_cofinal(b2()).is_yes
    assert is_cofinal(b2_disjoint()).is_no


def test_aperiodicity():
    assert aperiodicity_check(b2(), "v").is_yes
    for g in (c1(), t2()):
        t = aperiodicity_check(g, "v")
        assert t.value.value == "unknown" and "periodic" in t.note


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["B2", "L", "T2", "B2-tail", "B2+B2'", "LC-", "Delta1[-2..2]", "Omega1[0..3]"]), st.data())
def test_saturation_is_hereditary_and_closed(name, data):
    g = fixtures()[name]
    V = data.draw(st.sets(st.sampled_from(list(g.vertices)), min_size=1))
    r = saturation(g, V)
    S = r.closure
    # hereditary: every edge with range in S has its source in S
    for e in g.edges:
        if e.rng in S:
            assert e.src in S
    assert hereditary_closure(g, S) == S
