"""Pairs of an object set and an attribute set: classification, enumeration,
and the algebras they form under the two operation families.

``oo`` operations use the modal operators (box/diamond side), ``wille``
operations use the classical derivation.  Enumerations return pairs in
canonical order: extent mask ascending, then intent mask ascending.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import bits
from .context import FormalContext, black_box, complement_context, derive_extent, derive_intent, diamond
from .dba import DbaHom, FiniteDba, check_hom

DEFAULT_CAP = 20  # log2 of the candidate count 2^|G| * 2^|M|


class SizeCapError(RuntimeError):
    pass


def check_cap(ctx: FormalContext, cap: int | None = None, force: bool = False) -> None:
    """Refuse contexts whose candidate space 2^|G|·2^|M| exceeds 2^cap."""
    if cap is None:
        cap = DEFAULT_CAP
    elif cap > DEFAULT_CAP and not force:
        raise SizeCapError(f"raising the size cap above 2^{DEFAULT_CAP} requires force")
    total = ctx.n_objects + ctx.n_attributes
    if total > cap:
        raise SizeCapError(
            f"2^|G|·2^|M| = 2^{total} candidate pairs exceeds the bound 2^{cap}")


@dataclass(frozen=True)
class ConceptPair:
    """An (extent, intent) pair over a fixed context; flags are computed on demand."""
    ctx: FormalContext = field(repr=False, compare=False)
    extent: int
    intent: int

    def __post_init__(self):
        bits.check_width(self.extent, self.ctx.n_objects, "object set")
        bits.check_width(self.intent, self.ctx.n_attributes, "attribute set")

    @cached_property
    def semiconcept_left(self) -> bool:
        return derive_intent(self.ctx, self.extent) == self.intent

    @cached_property
    def semiconcept_right(self) -> bool:
        return derive_extent(self.ctx, self.intent) == self.extent

    @cached_property
    def protoconcept(self) -> bool:
        ctx = self.ctx
        return derive_extent(ctx, derive_intent(ctx, self.extent)) == derive_extent(ctx, self.intent)

    @cached_property
    def oo_semiconcept_left(self) -> bool:
        return black_box(self.ctx, self.extent) == self.intent

    @cached_property
    def oo_semiconcept_right(self) -> bool:
        return diamond(self.ctx, self.intent) == self.extent

    @cached_property
    def oo_protoconcept(self) -> bool:
        return diamond(self.ctx, black_box(self.ctx, self.extent)) == diamond(self.ctx, self.intent)

    @property
    def semiconcept(self) -> bool:
        return self.semiconcept_left or self.semiconcept_right

    @property
    def oo_semiconcept(self) -> bool:
        return self.oo_semiconcept_left or self.oo_semiconcept_right

    @property
    def concept(self) -> bool:
        return self.semiconcept_left and self.semiconcept_right

    @property
    def oo_concept(self) -> bool:
        return self.oo_semiconcept_left and self.oo_semiconcept_right

    def flags(self) -> dict[str, bool]:
        return {name: getattr(self, name) for name in (
            "semiconcept_left", "semiconcept_right", "protoconcept",
            "oo_semiconcept_left", "oo_semiconcept_right", "oo_protoconcept")}

    @property
    def key(self) -> tuple[int, int]:
        return self.extent, self.intent

    def label(self) -> str:
        return pair_label(self.ctx, self.extent, self.intent)

    def to_json(self) -> dict:
        return {"extent": self.ctx.object_names(self.extent),
                "intent": self.ctx.attribute_names(self.intent)}


def pair_label(ctx: FormalContext, extent: int, intent: int) -> str:
    return "({" + ",".join(ctx.object_names(extent)) + "},{" + ",".join(ctx.attribute_names(intent)) + "})"


def classify_pair(ctx: FormalContext, A: int, B: int) -> ConceptPair:
    p = ConceptPair(ctx, A, B)
    p.flags()
    return p


# enumeration


def _intersection_table(masks: Sequence[int], n: int, full: int) -> np.ndarray:
    table = np.full(1 << n, full, dtype=np.int64)
    for k, m in enumerate(masks):
        half = 1 << k
        table[half:2 * half] = table[:half] & m
    return table


def intent_table(ctx: FormalContext) -> np.ndarray:
    """A′ for every object mask A."""
    return _intersection_table(ctx.rows, ctx.n_objects, ctx.all_attributes)


def extent_table(ctx: FormalContext) -> np.ndarray:
    """B′ for every attribute mask B."""
    return _intersection_table(ctx.cols, ctx.n_attributes, ctx.all_objects)


def _match(left_key: np.ndarray, right_key: np.ndarray) -> list[tuple[int, int]]:
    """All (A, B) with left_key[A] == right_key[B], in canonical order."""
    order = np.argsort(right_key, kind="stable")
    sorted_keys = right_key[order]
    lo = np.searchsorted(sorted_keys, left_key, side="left")
    hi = np.searchsorted(sorted_keys, left_key, side="right")
    out = []
    for A in range(len(left_key)):
        for B in order[lo[A]:hi[A]]:
            out.append((A, int(B)))
    return out


def _dedupe_sorted(pairs: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    return sorted(set(pairs))


def oo_protoconcept_keys(ctx: FormalContext, cap=None, force=False) -> list[tuple[int, int]]:
    check_cap(ctx, cap, force)
    target = ctx.diamond_table[ctx.black_box_table]
    return _match(target, ctx.diamond_table)


def oo_semiconcept_keys(ctx: FormalContext, cap=None, force=False) -> list[tuple[int, int]]:
    check_cap(ctx, cap, force)
    bb, dia = ctx.black_box_table, ctx.diamond_table
    return _dedupe_sorted([(A, int(bb[A])) for A in range(len(bb))]
                          + [(int(dia[B]), B) for B in range(len(dia))])


def oo_concept_keys(ctx: FormalContext, cap=None, force=False) -> list[tuple[int, int]]:
    check_cap(ctx, cap, force)
    bb, dia = ctx.black_box_table, ctx.diamond_table
    return [(A, int(bb[A])) for A in range(len(bb)) if dia[bb[A]] == A]


def protoconcept_keys(ctx: FormalContext, cap=None, force=False) -> list[tuple[int, int]]:
    check_cap(ctx, cap, force)
    it, et = intent_table(ctx), extent_table(ctx)
    return _match(et[it], et)


def semiconcept_keys(ctx: FormalContext, cap=None, force=False) -> list[tuple[int, int]]:
    check_cap(ctx, cap, force)
    it, et = intent_table(ctx), extent_table(ctx)
    return _dedupe_sorted([(A, int(it[A])) for A in range(len(it))]
                          + [(int(et[B]), B) for B in range(len(et))])


def concept_keys(ctx: FormalContext, cap=None, force=False) -> list[tuple[int, int]]:
    check_cap(ctx, cap, force)
    it, et = intent_table(ctx), extent_table(ctx)
    return [(A, int(it[A])) for A in range(len(it)) if et[it[A]] == A]


def _wrap(ctx, keys):
    return [ConceptPair(ctx, A, B) for A, B in keys]


def enumerate_oo_protoconcepts(ctx, cap=None, force=False) -> list[ConceptPair]:
    return _wrap(ctx, oo_protoconcept_keys(ctx, cap, force))


def enumerate_oo_semiconcepts(ctx, cap=None, force=False) -> list[ConceptPair]:
    return _wrap(ctx, oo_semiconcept_keys(ctx, cap, force))


def enumerate_oo_concepts(ctx, cap=None, force=False) -> list[ConceptPair]:
    return _wrap(ctx, oo_concept_keys(ctx, cap, force))


def enumerate_protoconcepts(ctx, cap=None, force=False) -> list[ConceptPair]:
    return _wrap(ctx, protoconcept_keys(ctx, cap, force))


def enumerate_semiconcepts(ctx, cap=None, force=False) -> list[ConceptPair]:
    return _wrap(ctx, semiconcept_keys(ctx, cap, force))


def enumerate_concepts(ctx, cap=None, force=False) -> list[ConceptPair]:
    return _wrap(ctx, concept_keys(ctx, cap, force))


# operations on single pairs


def _same_ctx(p: ConceptPair, q: ConceptPair) -> FormalContext:
    if p.ctx is not q.ctx and p.ctx != q.ctx:
        raise ValueError("pairs belong to different contexts")
    return p.ctx


def oo_meet(p: ConceptPair, q: ConceptPair) -> ConceptPair:
    ctx = _same_ctx(p, q)
    A = p.extent | q.extent
    return ConceptPair(ctx, A, black_box(ctx, A))


def oo_join(p: ConceptPair, q: ConceptPair) -> ConceptPair:
    ctx = _same_ctx(p, q)
    B = p.intent & q.intent
    return ConceptPair(ctx, diamond(ctx, B), B)


def oo_neg(p: ConceptPair) -> ConceptPair:
    ctx = p.ctx
    A = ctx.all_objects ^ p.extent
    return ConceptPair(ctx, A, black_box(ctx, A))


def oo_opp(p: ConceptPair) -> ConceptPair:
    ctx = p.ctx
    B = ctx.all_attributes ^ p.intent
    return ConceptPair(ctx, diamond(ctx, B), B)


def oo_top(ctx: FormalContext) -> ConceptPair:
    return ConceptPair(ctx, 0, 0)


def oo_bot(ctx: FormalContext) -> ConceptPair:
    return ConceptPair(ctx, ctx.all_objects, ctx.all_attributes)


def wille_meet(p: ConceptPair, q: ConceptPair) -> ConceptPair:
    ctx = _same_ctx(p, q)
    A = p.extent & q.extent
    return ConceptPair(ctx, A, derive_intent(ctx, A))


def wille_join(p: ConceptPair, q: ConceptPair) -> ConceptPair:
    ctx = _same_ctx(p, q)
    B = p.intent & q.intent
    return ConceptPair(ctx, derive_extent(ctx, B), B)


def wille_neg(p: ConceptPair) -> ConceptPair:
    ctx = p.ctx
    A = ctx.all_objects ^ p.extent
    return ConceptPair(ctx, A, derive_intent(ctx, A))


def wille_opp(p: ConceptPair) -> ConceptPair:
    ctx = p.ctx
    B = ctx.all_attributes ^ p.intent
    return ConceptPair(ctx, derive_extent(ctx, B), B)


def wille_top(ctx: FormalContext) -> ConceptPair:
    return ConceptPair(ctx, ctx.all_objects, 0)


def wille_bot(ctx: FormalContext) -> ConceptPair:
    return ConceptPair(ctx, 0, ctx.all_attributes)


def pair_leq(p: ConceptPair, q: ConceptPair) -> bool:
    """Order of the modal family: (A,B) ⊑ (C,D) iff C ⊆ A and D ⊆ B."""
    _same_ctx(p, q)
    return bits.subset(q.extent, p.extent) and bits.subset(q.intent, p.intent)


def wille_leq(p: ConceptPair, q: ConceptPair) -> bool:
    """Quasi-order of the classical family, straight from its definition."""
    return wille_meet(p, q) == wille_meet(p, p) and wille_join(p, q) == wille_join(q, q)


# algebras


@dataclass(frozen=True, eq=False)
class ConceptDba(FiniteDba):
    """A FiniteDba whose elements are concrete pairs of one context."""
    context: FormalContext = None
    pairs: tuple[tuple[int, int], ...] = ()
    family: str = "oo"

    @cached_property
    def _index(self) -> dict[tuple[int, int], int]:
        return {p: i for i, p in enumerate(self.pairs)}

    def index_of(self, extent: int, intent: int) -> int:
        try:
            return self._index[(extent, intent)]
        except KeyError:
            raise KeyError(pair_label(self.context, extent, intent)) from None

    def find(self, extent: int, intent: int) -> int | None:
        return self._index.get((extent, intent))

    def element(self, i: int) -> ConceptPair:
        A, B = self.pairs[i]
        return ConceptPair(self.context, A, B)

    def _rebuild(self, keep, **tables) -> "ConceptDba":
        return ConceptDba(**tables, context=self.context,
                          pairs=tuple(self.pairs[i] for i in keep), family=self.family)

    def to_json(self) -> dict:
        ctx = self.context
        return {
            "family": self.family,
            "elements": [{"extent": ctx.object_names(A), "intent": ctx.attribute_names(B)}
                         for A, B in self.pairs],
            "n": self.n,
            "meet": self.meet.tolist(),
            "join": self.join.tolist(),
            "neg": self.neg.tolist(),
            "opp": self.opp.tolist(),
            "top": self.top,
            "bot": self.bot,
        }


DENSE_KEY_BITS = 24  # above this, look pairs up by binary search instead of a dense index


def _lookup(keys_sorted: np.ndarray, query: np.ndarray, what: str, dense: np.ndarray | None = None) -> np.ndarray:
    if dense is not None:
        pos = dense[query]
        if (pos < 0).any():
            raise ValueError(f"pair set is not closed under {what}")
        return pos.astype(np.intp, copy=False)
    pos = np.searchsorted(keys_sorted, query)
    pos = np.minimum(pos, len(keys_sorted) - 1)
    if not np.array_equal(keys_sorted[pos], query):
        raise ValueError(f"pair set is not closed under {what}")
    return pos


def pair_algebra(ctx: FormalContext, pairs: Sequence[tuple[int, int]], family: str = "oo") -> ConceptDba:
    """Operation tables of ``pairs`` under the chosen family; pairs must be sorted and closed."""
    pairs = [(int(A), int(B)) for A, B in pairs]
    if pairs != sorted(set(pairs)):
        raise ValueError("pairs must be distinct and in canonical order")
    shift = ctx.n_attributes
    full_g, full_m = ctx.all_objects, ctx.all_attributes
    ext = np.array([A for A, _ in pairs], dtype=np.int64)
    inn = np.array([B for _, B in pairs], dtype=np.int64)
    keys = (ext << shift) | inn

    if family == "oo":
        def close_ext(A):
            return ctx.black_box_table[A]

        def close_int(B):
            return ctx.diamond_table[B]

        meet_ext = ext[:, None] | ext[None, :]
        join_int = inn[:, None] & inn[None, :]
        top, bot = (0, 0), (full_g, full_m)
    elif family == "wille":
        it, et = intent_table(ctx), extent_table(ctx)

        def close_ext(A):
            return it[A]

        def close_int(B):
            return et[B]

        meet_ext = ext[:, None] & ext[None, :]
        join_int = inn[:, None] & inn[None, :]
        top, bot = (full_g, 0), (0, full_m)
    else:
        raise ValueError(f"unknown family {family!r}")

    dense = None
    if ctx.n_objects + shift <= DENSE_KEY_BITS:
        dense = np.full(1 << (ctx.n_objects + shift), -1, dtype=np.int32)
        dense[keys] = np.arange(len(keys), dtype=np.int32)
    neg_ext = full_g ^ ext
    opp_int = full_m ^ inn
    meet = _lookup(keys, (meet_ext << shift) | close_ext(meet_ext), "meet", dense)
    join = _lookup(keys, (close_int(join_int) << shift) | join_int, "join", dense)
    neg = _lookup(keys, (neg_ext << shift) | close_ext(neg_ext), "neg", dense)
    opp = _lookup(keys, (close_int(opp_int) << shift) | opp_int, "opp", dense)
    top_i = _lookup(keys, np.array([(top[0] << shift) | top[1]]), "top")[0]
    bot_i = _lookup(keys, np.array([(bot[0] << shift) | bot[1]]), "bot")[0]
    labels = tuple(pair_label(ctx, A, B) for A, B in pairs)
    return ConceptDba(meet, join, neg, opp, int(top_i), int(bot_i), labels,
                      context=ctx, pairs=tuple(pairs), family=family)


def build_proto_dba(ctx: FormalContext, cap=None, force=False) -> ConceptDba:
    """Object-oriented protoconcepts under the modal operations."""
    return pair_algebra(ctx, oo_protoconcept_keys(ctx, cap, force), "oo")


def build_semi_dba(ctx: FormalContext, cap=None, force=False) -> ConceptDba:
    """Object-oriented semiconcepts under the modal operations."""
    return pair_algebra(ctx, oo_semiconcept_keys(ctx, cap, force), "oo")


def build_wille_proto_dba(ctx: FormalContext, cap=None, force=False) -> ConceptDba:
    return pair_algebra(ctx, protoconcept_keys(ctx, cap, force), "wille")


def build_wille_semi_dba(ctx: FormalContext, cap=None, force=False) -> ConceptDba:
    return pair_algebra(ctx, semiconcept_keys(ctx, cap, force), "wille")


def inclusion_hom(small: ConceptDba, big: ConceptDba) -> DbaHom:
    """The map sending each pair of ``small`` to the same pair in ``big``."""
    return check_hom(small, big, [big.index_of(A, B) for A, B in small.pairs])


def wille_oo_transport(ctx: FormalContext, cap=None, force=False) -> DbaHom:
    """(A, B) ↦ (A^c, B) from classical protoconcepts of ``ctx`` to modal
    protoconcepts of the complement context, checked table by table."""
    src = build_wille_proto_dba(ctx, cap, force)
    dst = build_proto_dba(complement_context(ctx), cap, force)
    full_g = ctx.all_objects
    return check_hom(src, dst, [dst.index_of(full_g ^ A, B) for A, B in src.pairs])
