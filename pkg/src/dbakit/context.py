"""Finite formal contexts, their derivation operators and morphisms.

Object and attribute subsets are int bitmasks (see :mod:`dbakit.bits`).
``rows[g]`` is the attribute mask of object ``g``; ``cols[m]`` is the
object mask of attribute ``m``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from . import bits


class ContextFormatError(ValueError):
    pass


@dataclass(frozen=True)
class FormalContext:
    objects: tuple[str, ...]
    attributes: tuple[str, ...]
    rows: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        if len(set(self.objects)) != len(self.objects):
            raise ContextFormatError("duplicate object identifier")
        if len(set(self.attributes)) != len(self.attributes):
            raise ContextFormatError("duplicate attribute identifier")
        if len(self.rows) != len(self.objects):
            raise ContextFormatError(
                f"{len(self.rows)} incidence rows for {len(self.objects)} objects")
        width = len(self.attributes)
        for r in self.rows:
            bits.check_width(r, width, "incidence row")

    @classmethod
    def from_matrix(cls, objects: Sequence[str], attributes: Sequence[str],
                    incidence, name: str = "") -> "FormalContext":
        incidence = [list(map(bool, row)) for row in incidence]
        if len(incidence) != len(objects):
            raise ContextFormatError("incidence row count does not match objects")
        for row in incidence:
            if len(row) != len(attributes):
                raise ContextFormatError("incidence row length does not match attributes")
        rows = [bits.from_indices(j for j, v in enumerate(row) if v) for row in incidence]
        return cls(tuple(objects), tuple(attributes), tuple(rows), name)

    @classmethod
    def from_pairs(cls, objects, attributes, pairs, name: str = "") -> "FormalContext":
        """Build from ``(object_name, attribute_name)`` pairs."""
        oi = {g: i for i, g in enumerate(objects)}
        ai = {m: j for j, m in enumerate(attributes)}
        rows = [0] * len(oi)
        for g, m in pairs:
            rows[oi[g]] |= 1 << ai[m]
        return cls(tuple(objects), tuple(attributes), tuple(rows), name)

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    @property
    def all_objects(self) -> int:
        return bits.full(self.n_objects)

    @property
    def all_attributes(self) -> int:
        return bits.full(self.n_attributes)

    @cached_property
    def cols(self) -> tuple[int, ...]:
        out = [0] * self.n_attributes
        for g, row in enumerate(self.rows):
            for m in bits.indices(row):
                out[m] |= 1 << g
        return tuple(out)

    def incidence(self) -> np.ndarray:
        mat = np.zeros((self.n_objects, self.n_attributes), dtype=bool)
        for g, row in enumerate(self.rows):
            mat[g, bits.indices(row)] = True
        return mat

    def incident(self, g: int, m: int) -> bool:
        return bool(self.rows[g] >> m & 1)

    def n_incidences(self) -> int:
        return sum(bits.count(r) for r in self.rows)

    def object_set(self, names: Sequence[str]) -> int:
        index = {g: i for i, g in enumerate(self.objects)}
        return bits.from_indices(index[g] for g in names)

    def attribute_set(self, names: Sequence[str]) -> int:
        index = {m: i for i, m in enumerate(self.attributes)}
        return bits.from_indices(index[m] for m in names)

    def object_names(self, mask: int) -> list[str]:
        return [self.objects[i] for i in bits.indices(mask)]

    def attribute_names(self, mask: int) -> list[str]:
        return [self.attributes[i] for i in bits.indices(mask)]

    def transpose(self) -> "FormalContext":
        return FormalContext(self.attributes, self.objects, self.cols, self.name)

    # whole-powerset tables, built lazily for the enumerators

    @cached_property
    def diamond_table(self) -> np.ndarray:
        """``diamond_table[B]`` is the object mask of B^◇ for every attribute mask B."""
        return _union_table(self.cols, self.n_attributes)

    @cached_property
    def black_diamond_table(self) -> np.ndarray:
        return _union_table(self.rows, self.n_objects)

    @cached_property
    def box_table(self) -> np.ndarray:
        full_m = self.all_attributes
        return self.all_objects ^ self.diamond_table[full_m ^ np.arange(full_m + 1)]

    @cached_property
    def black_box_table(self) -> np.ndarray:
        full_g = self.all_objects
        return self.all_attributes ^ self.black_diamond_table[full_g ^ np.arange(full_g + 1)]


def _union_table(masks: Sequence[int], n: int) -> np.ndarray:
    table = np.zeros(1 << n, dtype=np.int64)
    for k, m in enumerate(masks):
        half = 1 << k
        table[half:2 * half] = table[:half] | m
    return table


def _check_objects(ctx: FormalContext, A: int) -> int:
    return bits.check_width(A, ctx.n_objects, "object set")


def _check_attributes(ctx: FormalContext, B: int) -> int:
    return bits.check_width(B, ctx.n_attributes, "attribute set")


def derive_intent(ctx: FormalContext, A: int) -> int:
    """Attributes shared by every object of ``A``."""
    _check_objects(ctx, A)
    out = ctx.all_attributes
    for g in bits.indices(A):
        out &= ctx.rows[g]
    return out


def derive_extent(ctx: FormalContext, B: int) -> int:
    """Objects having every attribute of ``B``."""
    _check_attributes(ctx, B)
    out = ctx.all_objects
    for m in bits.indices(B):
        out &= ctx.cols[m]
    return out


def diamond(ctx: FormalContext, B: int) -> int:
    """Objects related to at least one attribute of ``B``."""
    _check_attributes(ctx, B)
    out = 0
    for m in bits.indices(B):
        out |= ctx.cols[m]
    return out


def box(ctx: FormalContext, B: int) -> int:
    """Objects whose whole row lies inside ``B``."""
    _check_attributes(ctx, B)
    return bits.from_indices(g for g, row in enumerate(ctx.rows) if row & ~B == 0)


def black_diamond(ctx: FormalContext, A: int) -> int:
    """Attributes related to at least one object of ``A``."""
    _check_objects(ctx, A)
    out = 0
    for g in bits.indices(A):
        out |= ctx.rows[g]
    return out


def black_box(ctx: FormalContext, A: int) -> int:
    """Attributes whose whole column lies inside ``A``."""
    _check_objects(ctx, A)
    return bits.from_indices(m for m, col in enumerate(ctx.cols) if col & ~A == 0)


def complement_context(ctx: FormalContext) -> FormalContext:
    full_m = ctx.all_attributes
    return FormalContext(ctx.objects, ctx.attributes, tuple(full_m ^ r for r in ctx.rows), ctx.name)


def is_concept(ctx: FormalContext, A: int, B: int) -> bool:
    return derive_intent(ctx, A) == B and derive_extent(ctx, B) == A


def is_oo_concept(ctx: FormalContext, A: int, B: int) -> bool:
    return black_box(ctx, A) == B and diamond(ctx, B) == A


# morphisms


class MorphismClass(enum.IntEnum):
    NONE = 0
    HOMOMORPHISM = 1
    EMBEDDING = 2
    ISOMORPHISM = 3


def _check_map(mapping: Sequence[int], size: int, target: int, what: str) -> list[int]:
    mapping = [int(v) for v in mapping]
    if len(mapping) != size:
        raise ValueError(f"{what} map has {len(mapping)} entries, expected {size}")
    for v in mapping:
        if not 0 <= v < target:
            raise ValueError(f"{what} map value {v} out of range [0, {target})")
    return mapping


def check_context_morphism(ctx1: FormalContext, ctx2: FormalContext,
                           alpha: Sequence[int], beta: Sequence[int]) -> MorphismClass:
    """Strongest morphism class of ``(alpha, beta)`` from ``ctx1`` to ``ctx2``."""
    alpha = _check_map(alpha, ctx1.n_objects, ctx2.n_objects, "object")
    beta = _check_map(beta, ctx1.n_attributes, ctx2.n_attributes, "attribute")
    for g in range(ctx1.n_objects):
        row = ctx2.rows[alpha[g]]
        for m in range(ctx1.n_attributes):
            if ctx1.incident(g, m) != bool(row >> beta[m] & 1):
                return MorphismClass.NONE
    injective = len(set(alpha)) == len(alpha) and len(set(beta)) == len(beta)
    if not injective:
        return MorphismClass.HOMOMORPHISM
    if len(alpha) == ctx2.n_objects and len(beta) == ctx2.n_attributes:
        return MorphismClass.ISOMORPHISM
    return MorphismClass.EMBEDDING


def image_set(mapping: Sequence[int], mask: int) -> int:
    return bits.from_indices(mapping[i] for i in bits.indices(mask))


def preimage_set(mapping: Sequence[int], mask: int) -> int:
    return bits.from_indices(i for i, v in enumerate(mapping) if mask >> v & 1)


# file formats


def read_cxt(text: str) -> FormalContext:
    """Parse Burmeister .cxt text.

    A single blank line after the two size lines is tolerated since many
    tools write one.
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != "B":
        raise ContextFormatError("cxt input must start with a 'B' line")
    if len(lines) < 4:
        raise ContextFormatError("cxt input truncated before the size lines")
    name = lines[1]
    try:
        n_g, n_m = int(lines[2]), int(lines[3])
    except ValueError as exc:
        raise ContextFormatError(f"bad size line: {exc}") from None
    if n_g < 0 or n_m < 0:
        raise ContextFormatError("negative context size")
    body = lines[4:]
    while body and body[-1] == "":
        body.pop()
    expected = 2 * n_g + n_m
    if len(body) == expected + 1 and body[0] == "":
        body = body[1:]
    if len(body) != expected:
        raise ContextFormatError(f"expected {expected} lines after the header, found {len(body)}")
    objects = body[:n_g]
    attributes = body[n_g:n_g + n_m]
    rows = []
    for k, line in enumerate(body[n_g + n_m:]):
        if len(line) != n_m:
            raise ContextFormatError(f"row {k} has length {len(line)}, expected {n_m}")
        row = 0
        for j, ch in enumerate(line):
            if ch in "Xx":
                row |= 1 << j
            elif ch != ".":
                raise ContextFormatError(f"row {k} has bad character {ch!r}")
        rows.append(row)
    return FormalContext(tuple(objects), tuple(attributes), tuple(rows), name)


def write_cxt(ctx: FormalContext) -> str:
    lines = ["B", ctx.name, str(ctx.n_objects), str(ctx.n_attributes)]
    lines += ctx.objects
    lines += ctx.attributes
    for row in ctx.rows:
        lines.append("".join("X" if row >> j & 1 else "." for j in range(ctx.n_attributes)))
    return "\n".join(lines) + "\n"


def context_to_json(ctx: FormalContext) -> dict:
    return {
        "objects": list(ctx.objects),
        "attributes": list(ctx.attributes),
        "incidence": [[bool(row >> j & 1) for j in range(ctx.n_attributes)] for row in ctx.rows],
    }


def context_from_json(data) -> FormalContext:
    if not isinstance(data, dict):
        raise ContextFormatError("context JSON must be an object")
    try:
        objects, attributes, incidence = data["objects"], data["attributes"], data["incidence"]
    except KeyError as exc:
        raise ContextFormatError(f"context JSON missing key {exc}") from None
    for row in incidence:
        if not isinstance(row, list) or not all(isinstance(v, bool) for v in row):
            raise ContextFormatError("incidence rows must be lists of booleans")
    return FormalContext.from_matrix([str(g) for g in objects], [str(m) for m in attributes],
                                     incidence, data.get("name", ""))


def load_context(path) -> FormalContext:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        try:
            return context_from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ContextFormatError(f"invalid JSON: {exc}") from None
    return read_cxt(text)


def save_context(ctx: FormalContext, path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(context_to_json(ctx), indent=1) + "\n")
    else:
        path.write_text(write_cxt(ctx))
