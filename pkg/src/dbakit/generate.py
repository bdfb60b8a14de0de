"""Seeded random contexts and topologies."""

from __future__ import annotations

import numpy as np

from . import bits
from .context import FormalContext
from .topology import Cts, FiniteTopology

DENSITY_RANGE = (0.2, 0.8)


def rng_for(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_context(rng: np.random.Generator, n_objects: int, n_attributes: int,
                   density: float | None = None, name: str = "") -> FormalContext:
    if density is None:
        density = float(rng.uniform(*DENSITY_RANGE))
    matrix = rng.random((n_objects, n_attributes)) < density
    return FormalContext.from_matrix([f"g{i + 1}" for i in range(n_objects)],
                                     [f"m{j + 1}" for j in range(n_attributes)], matrix, name)


def random_topology(rng: np.random.Generator, n: int) -> FiniteTopology:
    """Topology generated by a few random open sets.

    The minimal neighbourhood of a point is the intersection of the
    generators containing it; every union of those is open.
    """
    full = bits.full(n)
    k = int(rng.integers(0, n + 2))
    generators = [int(bits.from_indices(np.flatnonzero(rng.random(n) < 0.5).tolist())) for _ in range(k)]
    nbhd = []
    for x in range(n):
        U = full
        for o in generators:
            if o >> x & 1:
                U &= o
        nbhd.append(U)
    return FiniteTopology.from_neighbourhoods(n, nbhd)


def random_cts(rng: np.random.Generator, max_objects: int = 5, max_attributes: int = 5) -> Cts:
    g = int(rng.integers(1, max_objects + 1))
    m = int(rng.integers(1, max_attributes + 1))
    ctx = random_context(rng, g, m)
    return Cts(ctx, random_topology(rng, g), random_topology(rng, m))


def seeded_contexts(seed: int, count: int, max_objects: int = 4, max_attributes: int = 4) -> list[FormalContext]:
    """``count`` contexts with sizes drawn from 1..max, reproducible from ``seed``."""
    rng = rng_for(seed)
    out = []
    for i in range(count):
        g = int(rng.integers(1, max_objects + 1))
        m = int(rng.integers(1, max_attributes + 1))
        out.append(random_context(rng, g, m, name=f"seed{seed}-{i}"))
    return out
