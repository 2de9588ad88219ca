"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

from __future__ import annotations

import itertools
import json
import os
import subprocess
import sys
import time
from fractions import Fraction

import jsonschema

from kgraph_lab.ckspan import (
    FormalElement,
    Generator,
    adjoint,
    closure_of,
    grading,
    multiply,
    verify_span_closed,
)
from kgraph_lab.cli import load_schema
from kgraph_lab.closure import (
    saturation,
    simplicity_decision,
    stranded_direct,
    stranded_vertices,
)
from kgraph_lab.constructions import (
    Cocycle,
    GroupSpec,
    MorphismMap,
    Window,
    delta_window,
    dual_graph,
    is_saturated_morphism,
    omega_window,
    skew_corner_experiment,
    skew_product,
    validate_morphism,
)
from kgraph_lab.core import degrees_upto, enumerate_paths, factorize, paths_upto
from kgraph_lab.alignment import lambda_min
from kgraph_lab.fixtures import FIXTURES, b2, b2_disjoint, c1, fixtures, line, lc_minus, t2
from kgraph_lab.parsing import dump_graph, dump_morphism

from oracles import Oracle


def _factorisation_graphs():
    return [
        t2(),
        b2(),
        c1(),
        line(),
        lc_minus(),
        dual_graph(b2(), (1,)),
        skew_product(b2(), GroupSpec.free(1), Cocycle(), Window((-2,), (2,))),
        skew_product(t2(), GroupSpec.free(2), Cocycle(), Window((-1, -1), (1, 1))),
    ]


def test_factorisation_against_oracle(criterion):
    with criterion(1, "factorisation is unique and matches the brute-force oracle") as c:
        start = time.perf_counter()
        checked = 0
        for g in _factorisation_graphs():
            o = Oracle(g)
            bound = (4,) * g.rank
            for v in g.vertices:
                for n in degrees_upto(bound):
                    ours = enumerate_paths(g, v, n)
                    assert {o.path_class(p) for p in ours} == (
                        o.paths(v, n) if sum(n) else {("id", v)}
                    ), f"{g.name}: path sets differ at {v}, {n}"
                    assert len(ours) == len({o.path_class(p) for p in ours})
                    for p in ours:
                        for m in degrees_upto(n):
                            splits = o.factorisations(p, m)
                            assert len(splits) == 1, f"{g.name}: {p} has {len(splits)} splits at {m}"
                            h, t = factorize(g, p, m)
                            assert {(o.path_class(h), o.path_class(t))} == splits
                            checked += 1
        elapsed = time.perf_counter() - start
        assert elapsed < 10, f"took {elapsed:.1f}s"
        c.detail = f"{checked} factorisations agree, {elapsed:.2f}s"


def test_lambda_min_against_pair_scan(criterion):
    with criterion(2, "Λ^min matches the pair-scan oracle and is symmetric") as c:
        pairs = 0
        for name, g in fixtures().items():
            o = Oracle(g)
            bound = (3,) * g.rank
            paths = [p for v in g.vertices for p in paths_upto(g, v, bound)]
            by_range: dict[str, list] = {}
            for p in paths:
                by_range.setdefault(p.rng, []).append(p)
            for group in by_range.values():
                for lam, mu in itertools.product(group, repeat=2):
                    ours = lambda_min(g, lam, mu)
                    got = {(o.path_class(a), o.path_class(b)) for a, b in ours}
                    assert got == o.min_extensions(lam, mu), f"{name}: Λ^min({lam},{mu})"
                    back = {(b, a) for a, b in lambda_min(g, mu, lam)}
                    assert back == {(a, b) for a, b in ours}, f"{name}: asymmetric at ({lam},{mu})"
                    pairs += 1
            # paths with different ranges never meet
            if len(by_range) > 1:
                r1, r2 = list(by_range)[:2]
                assert not lambda_min(g, by_range[r1][0], by_range[r2][0])
        c.detail = f"{pairs} pairs agree"


def test_saturation_closure_laws(criterion):
    with criterion(3, "saturation is extensive, monotone and idempotent; Σ({w}) = {u,w} on L") as c:
        runs = 0
        for name, g in fixtures().items():
            verts = list(g.vertices)
            if len(verts) > 4:
                continue
            subsets = [frozenset(s) for r in range(len(verts) + 1) for s in itertools.combinations(verts, r)]
            sigma = {}
            for S in subsets:
                res = saturation(g, S)
                assert res.complete, f"{name}: Σ({sorted(S)}) incomplete"
                assert S <= res.closure, f"{name}: not extensive at {sorted(S)}"
                again = saturation(g, res.closure)
                assert again.complete and again.closure == res.closure, f"{name}: not idempotent at {sorted(S)}"
                sigma[S] = res.closure
                runs += 2
            for S, T in itertools.product(subsets, repeat=2):
                if S <= T:
                    assert sigma[S] <= sigma[T], f"{name}: not monotone {sorted(S)} ⊆ {sorted(T)}"
        res = saturation(line(), ["w"])
        assert res.closure == {"u", "w"} and res.complete
        c.detail = f"{runs} saturation runs complete"


def test_lattice_windows(criterion):
    with criterion(4, "Δ windows: Σ(ℕ^k-part) is the window; Ω windows: every vertex stranded") as c:
        for k in (1, 2):
            for r in (2, 3):
                g = delta_window(k, r)
                X = [v for v in g.vertices if all(int(a) >= 0 for a in v.strip("()").split(","))]
                res = saturation(g, X)
                assert res.closure == frozenset(g.vertices), f"Δ_{k} radius {r}"
                assert res.complete
                assert not stranded_vertices(g).stranded, f"Δ_{k} radius {r} has stranded vertices"
        for k in (1, 2):
            for N in (1, 2, 3):
                g = omega_window(k, N)
                assert stranded_vertices(g).stranded == frozenset(g.vertices), f"Ω_{k} box {N}"
        c.detail = "Δ_k for k in 1,2 and r in 2,3; Ω_k for k in 1,2 and N in 1..3"


def _stranded_graphs():
    gs = list(fixtures().values())
    gs += [dual_graph(b2(), (1,)), omega_window(1, 2), delta_window(1, 3), omega_window(2, 1)]
    return gs


def test_stranded_recursion_vs_direct(criterion):
    with criterion(5, "stranded recursion equals the direct bounded probe") as c:
        n = 0
        for g in _stranded_graphs():
            for aware in (True, False):
                res = stranded_vertices(g, window_aware=aware)
                direct = stranded_direct(g, probe=len(g.vertices) * g.rank, window_aware=aware)
                assert res.stranded == direct, f"{g.name} (window_aware={aware}): {sorted(res.stranded ^ direct)}"
                n += 1
        c.detail = f"{n} graph/mode combinations, zero disagreements"


def _random_core_set(g, rng, size, bound):
    paths = [p for v in g.vertices for p in paths_upto(g, v, bound)]
    groups: dict[tuple, list] = {}
    for p in paths:
        groups.setdefault((p.src, p.degree), []).append(p)
    keys = sorted(groups)
    F = []
    for _ in range(size):
        grp = groups[rng.choice(keys)]
        F.append(Generator(rng.choice(grp), rng.choice(grp)))
    return F


def test_core_closure_is_finite_dimensional(criterion, rng):
    with criterion(6, "closure F̄ spans a finite-dimensional algebra with integer constants") as c:
        start = time.perf_counter()
        sets = 0
        for g in fixtures().values():
            bound = (3,) * g.rank
            for _ in range(50):
                F = _random_core_set(g, rng, rng.randint(1, 3), bound)
                C = closure_of(g, F)
                assert set(F) <= set(C.Fbar)
                assert {x.adjoint() for x in C.Fbar} == set(C.Fbar)
                check = verify_span_closed(g, C)
                assert check.closed, f"{g.name}: {check.defects[:3]}"
                assert all(isinstance(v, int) for row in check.structure_constants.values() for v in row.values())
                sets += 1
        g = b2()
        C = closure_of(g, [Generator(g.parse_path("a"), g.parse_path("b"))])
        assert [x.literal for x in C.Fbar] == ["T(v|v)", "T(a|a)", "T(a|b)", "T(b|a)", "T(b|b)"]
        table = verify_span_closed(g, C).structure_constants
        units = {(x, y): f"T({x}|{y})" for x in "ab" for y in "ab"}
        expected = {}
        for (x, y), left in units.items():
            for (z, w), right in units.items():
                if y == z:
                    expected[(left, right)] = {f"T({x}|{w})": 1}
            expected[("T(v|v)", left)] = {left: 1}
            expected[(left, "T(v|v)")] = {left: 1}
        expected[("T(v|v)", "T(v|v)")] = {"T(v|v)": 1}
        assert table == expected, "B2 structure constants differ from the 2x2 matrix units plus unit"
        # T_v - T_aa - T_bb is a nonzero idempotent orthogonal to the matrix units: the ℂ summand
        p = FormalElement.of(Generator(g.identity("v"), g.identity("v"))) - FormalElement.of(
            Generator(g.parse_path("a"), g.parse_path("a"))
        ) - FormalElement.of(Generator(g.parse_path("b"), g.parse_path("b")))
        assert multiply(p, p, g) == p and not p.is_zero
        for (x, y) in units:
            e = FormalElement.of(Generator(g.parse_path(x), g.parse_path(y)))
            assert multiply(p, e, g).is_zero and multiply(e, p, g).is_zero
        elapsed = time.perf_counter() - start
        assert elapsed < 30, f"took {elapsed:.1f}s"
        c.detail = f"{sets} random sets closed; B2 gives |F̄|=5 with M2⊕ℂ constants; {elapsed:.2f}s"


def _random_element(gens, rng):
    picks = rng.sample(gens, min(len(gens), rng.randint(1, 3)))
    return FormalElement((gen, Fraction(rng.randint(-3, 3) or 1, rng.randint(1, 2))) for gen in picks)


def test_algebra_laws(criterion, rng):
    with criterion(7, "associativity, involution and grading laws") as c:
        triples = pairs = 0
        pools = []
        for g in fixtures().values():
            F = _random_core_set(g, rng, 2, (2,) * g.rank)
            pools.append((g, list(closure_of(g, F).Fbar)))
            # general (not necessarily core) generators for the grading law
            paths = [p for v in g.vertices for p in paths_upto(g, v, (2,) * g.rank)]
            by_src: dict[str, list] = {}
            for p in paths:
                by_src.setdefault(p.src, []).append(p)
            gens = [Generator(a, b) for grp in by_src.values() for a in grp for b in grp]
            pools.append((g, gens))
        per_pool = -(-1000 // len(pools))
        for g, gens in pools:
            for _ in range(per_pool):
                x, y, z = (_random_element(gens, rng) for _ in range(3))
                assert multiply(multiply(x, y, g), z, g) == multiply(x, multiply(y, z, g), g), f"{g.name}"
                assert adjoint(adjoint(x)) == x
                xy = multiply(x, y, g)
                assert adjoint(xy) == multiply(adjoint(y), adjoint(x), g)
                triples += 1
                s, t = rng.choice(gens), rng.choice(gens)
                st = multiply(FormalElement.of(s), FormalElement.of(t), g)
                if not st.is_zero:
                    assert grading(st) == tuple(a + b for a, b in zip(s.degree, t.degree))
                    pairs += 1
        assert triples >= 1000
        c.detail = f"{triples} triples associative, {pairs} homogeneous products graded, zero violations"


def test_skew_corner_experiment(criterion):
    with criterion(8, "combinatorial criterion ⇔ windowed corner fullness") as c:
        rows = []
        for g in (b2(), c1(), line(), b2_disjoint()):
            for r in (2, 3):
                x = skew_corner_experiment(g, Window.cube(g.rank, r))
                a, b = x.combinatorial, x.corner_full
                assert a.value.value != "unknown" and b.value.value != "unknown", f"{g.name} r={r}"
                assert a.is_yes == b.is_yes, f"{g.name} r={r}: (a)={a.value} (b)={b.value}"
                assert x.agree
                rows.append(f"{g.name}/{r}:{a.value.value}")
        c.detail = ", ".join(rows)


def test_simplicity_decisions(criterion):
    with criterion(9, "B2 Simple, B2⊔B2' NotSimple, C1 Unknown (aperiodicity)") as c:
        d1 = simplicity_decision(b2(), ["v"])
        d2 = simplicity_decision(b2_disjoint(), ["v", "v'"])
        d3 = simplicity_decision(c1(), ["v"])
        assert d1.verdict == "Simple", d1
        assert d2.verdict == "NotSimple", d2
        assert d3.verdict == "Unknown" and any("aperiodic" in r for r in d3.reasons), d3
        c.detail = f"{d1.verdict}, {d2.verdict}, {d3.verdict} ({d3.reasons[0]})"


def _inclusion(k, N):
    om, de = omega_window(k, N), delta_window(k, N)
    phi = MorphismMap({v: v for v in om.vertices}, {e.id: e.id for e in om.edges})
    return om, de, phi


def test_morphism_checks(criterion):
    with criterion(10, "Ω→Δ inclusion saturated; B2→C1 collapse not saturated") as c:
        for k, N in ((1, 2), (1, 3), (2, 2)):
            om, de, phi = _inclusion(k, N)
            ok, bad = validate_morphism(phi, om, de)
            assert ok, bad
            t = is_saturated_morphism(phi, om, de, om.vertices, (N,) * k)
            assert t.is_yes, f"Ω_{k}→Δ_{k} N={N}: {t}"
        g1, g2 = b2(), c1()
        phi = MorphismMap({"v": "v"}, {"a": "loop", "b": "loop"})
        assert validate_morphism(phi, g1, g2)[0]
        t = is_saturated_morphism(phi, g1, g2, ["v"], (2,))
        assert t.is_no
        pair = {p.literal for p in t.witness}
        assert pair == {"a", "b"}, t.witness
        c.detail = f"inclusion Yes at bound = radius; collapse No with witness {sorted(pair)}"


def _cli(args, seed, hashseed):
    env = dict(os.environ, KGRAPH_LAB_SEED=str(seed), PYTHONHASHSEED=str(hashseed))
    return subprocess.run([sys.executable, "-m", "kgraph_lab.cli", *args], capture_output=True, env=env)


def _cli_invocations(tmp_path):
    om, de, phi = _inclusion(1, 2)
    (tmp_path / "om.kg").write_text(dump_graph(om))
    (tmp_path / "de.kg").write_text(dump_graph(de))
    (tmp_path / "inc.map").write_text(dump_morphism(phi))
    (tmp_path / "collapse.map").write_text("vertex v -> v\nedge a -> loop\nedge b -> loop\n")
    (tmp_path / "b2.kg").write_text(dump_graph(b2()))
    inv = []
    for name in FIXTURES:
        g = f"fixture:{name}"
        inv.append(["validate", "--graph", g])
        if name == "T2-missing-square":
            continue
        v = FIXTURES[name]().vertices[0]
        inv += [
            ["paths", "--graph", g, "--vertex", v, "--max-degree", "2"],
            ["saturate", "--graph", g, "--set", v],
            ["essential", "--graph", g],
            ["corner-report", "--graph", g, "--x", v],
            ["dual", "--graph", g, "--p", "1"],
            ["ck-span", "--graph", g, "--f", f"T({v}|{v})"],
            ["exhaustive", "--graph", g, "--vertex", v],
        ]
    inv += [
        ["lambda-min", "--graph", "fixture:T2", "--lam", "e", "--mu", "f"],
        ["exhaustive", "--graph", "fixture:B2", "--vertex", "v", "--e", "a,b"],
        ["skew", "--graph", "fixture:B2", "--window=-2..2"],
        ["skew", "--graph", "fixture:T2", "--window", "0..1,0..1"],
        ["ck-span", "--graph", str(tmp_path / "b2.kg"), "--f", "T(a,b)"],
        ["corner-report", "--graph", "fixture:B2+B2'", "--x", "v,v'", "--y", "v"],
        ["morphism-check", "--graph", str(tmp_path / "om.kg"), "--target", str(tmp_path / "de.kg"),
         "--map", str(tmp_path / "inc.map"), "--x", "(0),(1),(2)", "--max-degree", "2"],
        ["morphism-check", "--graph", "fixture:B2", "--target", "fixture:C1",
         "--map", str(tmp_path / "collapse.map"), "--x", "v", "--max-degree", "2"],
    ]
    return inv


def test_cli_determinism(criterion, tmp_path):
    with criterion(11, "CLI output is byte-identical across runs with the same seed") as c:
        schema = load_schema()
        n = 0
        for args in _cli_invocations(tmp_path):
            for fmt in ("json", "text"):
                full = args + ["--format", fmt]
                r1, r2 = _cli(full, 7, 1), _cli(full, 7, 2)
                assert r1.returncode in (0, 1), f"{full}: exit {r1.returncode}: {r1.stderr.decode()}"
                assert (r1.returncode, r1.stdout, r1.stderr) == (r2.returncode, r2.stdout, r2.stderr), full
                if fmt == "json" and r1.stdout:
                    jsonschema.validate(json.loads(r1.stdout), schema)
                n += 1
        c.detail = f"{n} invocations byte-identical (different hash seeds), JSON schema-valid"
