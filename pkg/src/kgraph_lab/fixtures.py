"""Small named k-graphs used throughout the tests and the CLI."""

from __future__ import annotations

from typing import Callable

from .constructions import delta_window, omega_window
from .core import Edge, KGraph, Square, validate_kgraph


def t2() -> KGraph:
    """One vertex, one edge in each of two colours, ``ef = fe``."""
    return validate_kgraph(
        KGraph(2, ["v"], [Edge("e", 1, "v", "v"), Edge("f", 2, "v", "v")], [Square("e", "f", "f", "e")], name="T2")
    )


def t2_missing_square() -> KGraph:
    """T2 without its square; does not validate."""
    return KGraph(2, ["v"], [Edge("e", 1, "v", "v"), Edge("f", 2, "v", "v")], name="T2-missing-square")


def b2() -> KGraph:
    """Two loops at one vertex (the Cuntz graph O_2)."""
    return validate_kgraph(KGraph(1, ["v"], [Edge("a", 1, "v", "v"), Edge("b", 1, "v", "v")], name="B2"))


def c1() -> KGraph:
    """A single loop."""
    return validate_kgraph(KGraph(1, ["v"], [Edge("loop", 1, "v", "v")], name="C1"))


def line() -> KGraph:
    """One edge ``a`` with range ``u`` and source ``w``."""
    return validate_kgraph(KGraph(1, ["u", "w"], [Edge("a", 1, "w", "u")], name="L"))


def lc_minus() -> KGraph:
    """A 2-graph that is not locally convex: ``e: w → v`` (colour 1), ``f: u → v`` (colour 2)."""
    return validate_kgraph(
        KGraph(2, ["u", "v", "w"], [Edge("e", 1, "w", "v"), Edge("f", 2, "u", "v")], name="LC-")
    )


def b2_disjoint() -> KGraph:
    """Two disjoint copies of B2, on vertices ``v`` and ``v'``."""
    edges = [Edge("a", 1, "v", "v"), Edge("b", 1, "v", "v"), Edge("a'", 1, "v'", "v'"), Edge("b'", 1, "v'", "v'")]
    return validate_kgraph(KGraph(1, ["v", "v'"], edges, name="B2+B2'"))


def b2_tail() -> KGraph:
    """B2 with an extra vertex ``t`` and an edge ``t_in`` from ``v`` into ``t``."""
    edges = [Edge("a", 1, "v", "v"), Edge("b", 1, "v", "v"), Edge("t_in", 1, "v", "t")]
    return validate_kgraph(KGraph(1, ["t", "v"], edges, name="B2-tail"))


FIXTURES: dict[str, Callable[[], KGraph]] = {
    "T2": t2,
    "T2-missing-square": t2_missing_square,
    "B2": b2,
    "C1": c1,
    "L": line,
    "LC-": lc_minus,
    "B2+B2'": b2_disjoint,
    "B2-tail": b2_tail,
    "Omega1[0..3]": lambda: omega_window(1, 3),
    "Omega2[0..2]": lambda: omega_window(2, 2),
    "Delta1[-2..2]": lambda: delta_window(1, 2),
    "Delta2[-2..2]": lambda: delta_window(2, 2),
}

# Fixtures that validate; the rest exist to exercise error paths.
VALID = [name for name in FIXTURES if name != "T2-missing-square"]


def describe_fixture(name: str) -> str:
    make = FIXTURES[name]
    if make.__doc__ and make.__name__ != "<lambda>":
        return make.__doc__.strip().splitlines()[0]
    g = make()
    kind = "Ω" if name.startswith("Omega") else "Δ"
    return f"{kind}_{g.rank} lattice window {g.window}, cut faces recorded as truncation slots"


def fixtures() -> dict[str, KGraph]:
    """Build every valid fixture, keyed by name."""
    return {name: FIXTURES[name]() for name in VALID}


def get_fixture(name: str) -> KGraph:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}") from None
