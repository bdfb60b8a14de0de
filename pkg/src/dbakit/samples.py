"""Small fixed instances used by the tests and the command line."""

from __future__ import annotations

from .context import FormalContext
from .topology import Cts, FiniteTopology

_SURVEY_ROWS = (
    "X.X.X.X..X.",
    ".XXX.X.X...",
    "XX.X.X..X..",
    "X.X.X......",
    "....X..XX.X",
    "..........X",
)


def survey_context() -> FormalContext:
    """Six objects q1..q6 and eleven attributes s1..s11."""
    objects = [f"q{i}" for i in range(1, 7)]
    attributes = [f"s{j}" for j in range(1, 12)]
    matrix = [[c == "X" for c in row] for row in _SURVEY_ROWS]
    return FormalContext.from_matrix(objects, attributes, matrix, name="survey")


def five_by_four_cts() -> Cts:
    """Context on two coarse spaces that is not continuous in both directions."""
    ctx = FormalContext.from_pairs(
        "abcde", "1234",
        [("a", "2"), ("b", "2"), ("c", "4"), ("d", "1"), ("d", "4"), ("e", "1"), ("e", "3")],
        name="five-by-four")
    tau = FiniteTopology(5, [0, ctx.object_set("abc"), ctx.object_set("de"), ctx.all_objects])
    rho = FiniteTopology(4, [0, ctx.attribute_set("2"), ctx.attribute_set("134"), ctx.all_attributes])
    return Cts(ctx, tau, rho)


def constant_clopen_cts(object_topology: FiniteTopology, attribute_topology: FiniteTopology,
                        target: int) -> Cts:
    """Every object related to exactly the points of the clopen set ``target``."""
    if not target or not attribute_topology.is_clopen(target):
        raise ValueError("target must be a nonempty clopen set")
    n, k = object_topology.n, attribute_topology.n
    ctx = FormalContext([f"x{i}" for i in range(n)], [f"y{j}" for j in range(k)], (target,) * n)
    return Cts(ctx, object_topology, attribute_topology)


def identity_counterexample() -> Cts:
    """Identity relation from a two-point space with one proper open set to a discrete one."""
    ctx = FormalContext.from_matrix(["1", "2"], ["1", "2"], [[True, False], [False, True]])
    return Cts(ctx, FiniteTopology(2, [0, 1, 3]), FiniteTopology.discrete(2))
