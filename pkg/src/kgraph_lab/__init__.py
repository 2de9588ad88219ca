"""Combinatorics of finitely aligned k-graphs and their Cuntz–Krieger corners."""

from __future__ import annotations

__version__ = "0.1.0"

from .alignment import (
    ExtensionPair,
    boundary_paths,
    common_extensions,
    find_finite_exhaustive,
    is_exhaustive,
    is_finitely_aligned,
    is_locally_convex,
    lambda_min,
    row_finite_report,
)
from .ckspan import (
    ClosureSet,
    FormalElement,
    Generator,
    adjoint,
    closure_of,
    core_filter,
    expand_ck3,
    grading,
    multiply,
    parse_generator,
    verify_span_closed,
)
from .closure import (
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
    simplicity_decision,
    stranded_vertices,
)
from .constructions import (
    Cocycle,
    GroupSpec,
    MorphismMap,
    Window,
    check_pairwise_min_empty,
    delta_window,
    dual_graph,
    is_saturated_morphism,
    omega_window,
    skew_corner_experiment,
    skew_product,
    validate_cocycle,
    validate_morphism,
)
from .core import Edge, KGraph, Path, Square, check_kgraph, compose, enumerate_paths, factorize, validate_kgraph
from .fixtures import fixtures, get_fixture
from .verdicts import TriState, Verdict
