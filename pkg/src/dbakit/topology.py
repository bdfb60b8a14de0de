"""Finite topological spaces, contexts on them, and continuity of relations.

A topology on ``n`` points is stored as the explicit family of open
masks.  A context on topological spaces (``Cts``) pairs a formal context
with a topology on its objects and one on its attributes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from . import bits
from .concepts import ConceptDba, pair_algebra
from .context import (FormalContext, MorphismClass, black_box, black_diamond, box,
                      check_context_morphism, context_from_json, context_to_json, diamond,
                      preimage_set)
from .dba import DbaHom, check_hom


@dataclass(frozen=True)
class FiniteTopology:
    n: int
    opens: tuple[int, ...]
    checked: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "opens", tuple(sorted(set(int(o) for o in self.opens))))
        if self.checked:
            ok, reasons = validate_topology(self.n, self.opens)
            if not ok:
                raise ValueError("not a topology: " + "; ".join(reasons))

    @classmethod
    def discrete(cls, n: int) -> "FiniteTopology":
        return cls(n, tuple(range(1 << n)), checked=False)

    @classmethod
    def indiscrete(cls, n: int) -> "FiniteTopology":
        return cls(n, (0, bits.full(n)), checked=False)

    @classmethod
    def from_neighbourhoods(cls, n: int, nbhd: Sequence[int]) -> "FiniteTopology":
        """Topology whose open sets are the unions of the given point neighbourhoods.

        Each ``nbhd[x]`` must contain x, and must contain ``nbhd[y]`` for
        every y inside it.
        """
        if len(nbhd) != n:
            raise ValueError(f"expected {n} neighbourhoods, got {len(nbhd)}")
        for x, U in enumerate(nbhd):
            if not U >> x & 1 or U & ~bits.full(n):
                raise ValueError(f"neighbourhood of point {x} does not contain it")
            if any(nbhd[y] & ~U for y in bits.indices(U)):
                raise ValueError(f"neighbourhood of point {x} is not open")
        return cls(n, tuple(_unions(nbhd, n)), checked=False)

    @cached_property
    def _open_set(self) -> frozenset[int]:
        return frozenset(self.opens)

    @property
    def full(self) -> int:
        return bits.full(self.n)

    def is_open(self, S: int) -> bool:
        return S in self._open_set

    def is_closed(self, S: int) -> bool:
        return (self.full ^ S) in self._open_set

    def is_clopen(self, S: int) -> bool:
        return self.is_open(S) and self.is_closed(S)

    @cached_property
    def clopens(self) -> tuple[int, ...]:
        return tuple(o for o in self.opens if self.is_closed(o))

    @cached_property
    def neighbourhoods(self) -> tuple[int, ...]:
        """Smallest open set containing each point."""
        if self.is_discrete:
            return tuple(1 << x for x in range(self.n))
        return tuple(_minimal_neighbourhoods(self.n, self.opens))

    @property
    def is_discrete(self) -> bool:
        return len(self.opens) == 1 << self.n

    def totally_disconnected(self) -> bool:
        """Every two distinct points are split by a clopen set."""
        if self.is_discrete:
            return True
        for x in range(self.n):
            for y in range(x + 1, self.n):
                if not any((c >> x & 1) != (c >> y & 1) for c in self.clopens):
                    return False
        return True

    def to_json(self) -> list[list[int]]:
        return [bits.indices(o) for o in self.opens]


def _unions(generators: Sequence[int], n: int) -> set[int]:
    family = {0}
    for g in generators:
        family |= {f | g for f in family}
    return family


def _minimal_neighbourhoods(n: int, opens: Iterable[int]) -> list[int]:
    full = bits.full(n)
    out = [full] * n
    for o in opens:
        for x in bits.indices(o):
            out[x] &= o
    return out


def validate_topology(n: int, opens: Iterable[int]) -> tuple[bool, list[str]]:
    """Check that ``opens`` holds ∅ and the whole set and is closed under ∪ and ∩.

    Fast route: a family is a topology exactly when every union of its
    minimal neighbourhoods belongs to it.  Reasons are collected by a
    pairwise scan only when that test fails.
    """
    opens = set(int(o) for o in opens)
    full = bits.full(n)
    reasons = []
    for o in sorted(opens):
        if o < 0 or o & ~full:
            reasons.append(f"set {o:#x} is not a subset of the {n}-point ground set")
    if 0 not in opens:
        reasons.append("empty set missing")
    if full not in opens:
        reasons.append("whole space missing")
    if reasons:
        return False, reasons
    family = {0}
    for U in _minimal_neighbourhoods(n, opens):
        family |= {f | U for f in family}
        if not family <= opens:
            break
    if family <= opens:
        return True, []
    ordered = sorted(opens)
    for i, a in enumerate(ordered):
        for b in ordered[i + 1:]:
            if a | b not in opens:
                reasons.append(f"union {bits.indices(a)} ∪ {bits.indices(b)} missing")
            if a & b not in opens:
                reasons.append(f"intersection {bits.indices(a)} ∩ {bits.indices(b)} missing")
            if len(reasons) >= 20:
                return False, reasons
    return False, reasons


def generate_from_closed_subbase(n: int, subbase: Iterable[int]) -> FiniteTopology:
    """Topology whose closed sets are intersections of finite unions of ``subbase``.

    Open subbase members are the complements; the smallest open set around a
    point is the intersection of the open subbase members containing it, and
    every open set is a union of these.
    """
    full = bits.full(n)
    open_sub = [full ^ s for s in subbase]
    nbhd = []
    for x in range(n):
        U = full
        for o in open_sub:
            if o >> x & 1:
                U &= o
        nbhd.append(U)
    return FiniteTopology.from_neighbourhoods(n, nbhd)


def closed_sets_by_closure(n: int, subbase: Iterable[int]) -> set[int]:
    """Reference construction: close under finite unions, then intersections."""
    full = bits.full(n)
    family = {0}
    for s in subbase:
        family |= {f | s for f in family}
    family.add(full)
    changed = True
    while changed:
        changed = False
        for a in list(family):
            for b in list(family):
                if a & b not in family:
                    family.add(a & b)
                    changed = True
    return family


def preimage_is_open(src: FiniteTopology, dst: FiniteTopology, f: Sequence[int]) -> bool:
    """Continuity of the point map ``f`` from ``src`` to ``dst``."""
    return all(src.is_open(preimage_set(f, o)) for o in dst.opens)


# contexts on topological spaces


@dataclass(frozen=True, eq=False)
class Cts:
    context: FormalContext
    object_topology: FiniteTopology
    attribute_topology: FiniteTopology

    def __post_init__(self):
        if self.object_topology.n != self.context.n_objects:
            raise ValueError("object topology size does not match the context")
        if self.attribute_topology.n != self.context.n_attributes:
            raise ValueError("attribute topology size does not match the context")

    @classmethod
    def discrete(cls, ctx: FormalContext) -> "Cts":
        return cls(ctx, FiniteTopology.discrete(ctx.n_objects), FiniteTopology.discrete(ctx.n_attributes))

    @cached_property
    def relation_lower(self) -> bool:
        return is_lower_semicontinuous(self)

    @cached_property
    def relation_upper(self) -> bool:
        return is_upper_semicontinuous(self)

    @property
    def relation_continuous(self) -> bool:
        return self.relation_lower and self.relation_upper

    @cached_property
    def converse_continuous(self) -> bool:
        return is_converse_continuous(self)

    @cached_property
    def is_ctscr(self) -> bool:
        return validate_ctscr(self)

    @cached_property
    def is_stone(self) -> bool:
        return is_stone_context(self)

    def transpose(self) -> "Cts":
        return Cts(self.context.transpose(), self.attribute_topology, self.object_topology)


def is_upper_semicontinuous(cts: Cts) -> bool:
    """Box of every open attribute set is open among objects."""
    ctx = cts.context
    return all(cts.object_topology.is_open(box(ctx, O)) for O in cts.attribute_topology.opens)


def is_lower_semicontinuous(cts: Cts) -> bool:
    """Diamond of every open attribute set is open among objects."""
    ctx = cts.context
    return all(cts.object_topology.is_open(diamond(ctx, O)) for O in cts.attribute_topology.opens)


def is_converse_continuous(cts: Cts) -> bool:
    ctx = cts.context
    rho = cts.attribute_topology
    return all(rho.is_open(black_diamond(ctx, A)) and rho.is_open(black_box(ctx, A))
               for A in cts.object_topology.opens)


def validate_ctscr(cts: Cts) -> bool:
    return cts.relation_lower and cts.relation_upper and cts.converse_continuous


def pointwise_semicontinuity(cts: Cts) -> dict[str, bool]:
    """Semicontinuity of the relation and its converse from the point-and-neighbourhood definition.

    Lower at x0: every open O meeting R(x0) has an open U around x0 whose
    points all meet O.  Upper at x0: every open O containing R(x0) has an
    open U around x0 whose points all have R(x) inside O.
    """
    def check(rows, src_opens, dst_opens, n_src):
        lower = upper = True
        for x0 in range(n_src):
            around = [U for U in src_opens if U >> x0 & 1]
            for O in dst_opens:
                if lower and rows[x0] & O:
                    lower = any(all(rows[x] & O for x in bits.indices(U)) for U in around)
                if upper and rows[x0] & ~O == 0:
                    upper = any(all(rows[x] & ~O == 0 for x in bits.indices(U)) for U in around)
        return lower, upper

    ctx = cts.context
    tau, rho = cts.object_topology.opens, cts.attribute_topology.opens
    lo, up = check(ctx.rows, tau, rho, ctx.n_objects)
    clo, cup = check(ctx.cols, rho, tau, ctx.n_attributes)
    return {"relation_lower": lo, "relation_upper": up, "converse_lower": clo, "converse_upper": cup}


def open_set_semicontinuity(cts: Cts) -> dict[str, bool]:
    ctx = cts.context
    tau, rho = cts.object_topology, cts.attribute_topology
    return {
        "relation_lower": cts.relation_lower,
        "relation_upper": cts.relation_upper,
        "converse_lower": all(rho.is_open(black_diamond(ctx, A)) for A in tau.opens),
        "converse_upper": all(rho.is_open(black_box(ctx, A)) for A in tau.opens),
    }


# clopen pairs


class NotCtscrError(ValueError):
    pass


def _clopen_proto_keys(cts: Cts) -> list[tuple[int, int]]:
    ctx = cts.context
    tau_c, rho_c = cts.object_topology.clopens, cts.attribute_topology.clopens
    by_diamond: dict[int, list[int]] = {}
    for B in rho_c:
        by_diamond.setdefault(diamond(ctx, B), []).append(B)
    out = []
    for A in tau_c:
        for B in by_diamond.get(diamond(ctx, black_box(ctx, A)), ()):
            out.append((A, B))
    return sorted(out)


def _clopen_semi_keys(cts: Cts) -> list[tuple[int, int]]:
    ctx = cts.context
    tau, rho = cts.object_topology, cts.attribute_topology
    pairs = set()
    for A in tau.clopens:
        B = black_box(ctx, A)
        if rho.is_clopen(B):
            pairs.add((A, B))
    for B in rho.clopens:
        A = diamond(ctx, B)
        if tau.is_clopen(A):
            pairs.add((A, B))
    return sorted(pairs)


def enumerate_clopen_oo_protoconcepts(cts: Cts) -> list[tuple[int, int]]:
    return _clopen_proto_keys(cts)


def enumerate_clopen_oo_semiconcepts(cts: Cts) -> list[tuple[int, int]]:
    return _clopen_semi_keys(cts)


def _require_ctscr(cts: Cts) -> None:
    if not cts.is_ctscr:
        raise NotCtscrError("clopen pairs are closed under the operations only when "
                            "the relation and its converse are continuous")


def clopen_proto_dba(cts: Cts) -> ConceptDba:
    _require_ctscr(cts)
    return pair_algebra(cts.context, _clopen_proto_keys(cts), "oo")


def clopen_semi_dba(cts: Cts) -> ConceptDba:
    _require_ctscr(cts)
    return pair_algebra(cts.context, _clopen_semi_keys(cts), "oo")


# Stone contexts


def relation_from_clopen_semiconcepts(cts: Cts) -> tuple[int, ...]:
    """Rows of the relation recovered from clopen semiconcepts.

    Object g gets attribute m when every clopen semiconcept whose intent
    holds m has g in its extent.
    """
    ctx = cts.context
    cols = []
    semis = _clopen_semi_keys(cts)
    for m in range(ctx.n_attributes):
        allowed = ctx.all_objects
        for A, B in semis:
            if B >> m & 1:
                allowed &= A
        cols.append(allowed)
    rows = [0] * ctx.n_objects
    for m, col in enumerate(cols):
        for g in bits.indices(col):
            rows[g] |= 1 << m
    return tuple(rows)


def is_stone_context(cts: Cts) -> bool:
    if not cts.is_ctscr:
        return False
    for top in (cts.object_topology, cts.attribute_topology):
        if not top.totally_disconnected():
            return False
        # finite and totally disconnected forces every singleton to be clopen
        assert top.is_discrete, "finite totally disconnected space must be discrete"
    recovered = relation_from_clopen_semiconcepts(cts)
    # condition: recovered ⊆ R; the reverse inclusion always holds
    if any(r & ~row for r, row in zip(recovered, cts.context.rows)):
        return False
    assert all(row & ~r == 0 for r, row in zip(recovered, cts.context.rows)), \
        "incident pair excluded by a clopen semiconcept"
    return True


# morphisms


class CtsClass(enum.IntEnum):
    NONE = 0
    HOMOMORPHISM = 1
    EMBEDDING = 2
    ISOMORPHISM = 3
    HOMEOMORPHISM = 4


@dataclass(frozen=True)
class CtsHom:
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    verdict: CtsClass
    context_class: MorphismClass
    continuous: bool

    @property
    def is_homeomorphism(self) -> bool:
        return self.verdict == CtsClass.HOMEOMORPHISM


def _inverse(f: Sequence[int]) -> list[int]:
    inv = [0] * len(f)
    for i, v in enumerate(f):
        inv[v] = i
    return inv


def check_cts_morphism(cts1: Cts, cts2: Cts, alpha: Sequence[int], beta: Sequence[int]) -> CtsHom:
    alpha, beta = tuple(int(a) for a in alpha), tuple(int(b) for b in beta)
    cls = check_context_morphism(cts1.context, cts2.context, alpha, beta)
    continuous = (preimage_is_open(cts1.object_topology, cts2.object_topology, alpha)
                  and preimage_is_open(cts1.attribute_topology, cts2.attribute_topology, beta))
    if cls == MorphismClass.NONE or not continuous:
        verdict = CtsClass.NONE
    elif cls == MorphismClass.ISOMORPHISM:
        inverse_continuous = (
            preimage_is_open(cts2.object_topology, cts1.object_topology, _inverse(alpha))
            and preimage_is_open(cts2.attribute_topology, cts1.attribute_topology, _inverse(beta)))
        verdict = CtsClass.HOMEOMORPHISM if inverse_continuous else CtsClass.ISOMORPHISM
    else:
        verdict = CtsClass(int(cls))
    return CtsHom(alpha, beta, verdict, cls, continuous)


def compose_cts(second: CtsHom, first: CtsHom, cts_from: Cts, cts_to: Cts) -> CtsHom:
    """second ∘ first, re-checked from ``cts_from`` to ``cts_to``."""
    alpha = [second.alpha[a] for a in first.alpha]
    beta = [second.beta[b] for b in first.beta]
    return check_cts_morphism(cts_from, cts_to, alpha, beta)


def induced_dba_iso(hom: CtsHom, cts1: Cts, cts2: Cts, semi: bool = False) -> DbaHom:
    """(A, B) ↦ (α⁻¹(A), β⁻¹(B)) from clopen pairs of ``cts2`` to those of ``cts1``."""
    if hom.verdict < CtsClass.HOMEOMORPHISM:
        raise ValueError(f"requires a homeomorphism, got {hom.verdict.name.lower()}")
    build = clopen_semi_dba if semi else clopen_proto_dba
    src, dst = build(cts2), build(cts1)
    mapping = [dst.index_of(preimage_set(hom.alpha, A), preimage_set(hom.beta, B)) for A, B in src.pairs]
    return check_hom(src, dst, mapping)


def transport_cts(cts: Cts, alpha: Sequence[int], beta: Sequence[int]) -> Cts:
    """Copy of ``cts`` along bijections of objects and attributes."""
    ctx = cts.context
    objects = [None] * ctx.n_objects
    attributes = [None] * ctx.n_attributes
    for g, a in enumerate(alpha):
        objects[a] = ctx.objects[g]
    for m, b in enumerate(beta):
        attributes[b] = ctx.attributes[m]
    rows = [0] * ctx.n_objects
    for g in range(ctx.n_objects):
        for m in bits.indices(ctx.rows[g]):
            rows[alpha[g]] |= 1 << beta[m]

    def move(top, f):
        return FiniteTopology(top.n, [bits.from_indices(f[i] for i in bits.indices(o)) for o in top.opens])

    return Cts(FormalContext(tuple(objects), tuple(attributes), tuple(rows), ctx.name),
               move(cts.object_topology, alpha), move(cts.attribute_topology, beta))


# JSON


def cts_to_json(cts: Cts) -> dict:
    return {
        "context": context_to_json(cts.context),
        "object_opens": cts.object_topology.to_json(),
        "attribute_opens": cts.attribute_topology.to_json(),
    }


def _opens_from_json(value, n: int) -> FiniteTopology:
    if value == "discrete":
        return FiniteTopology.discrete(n)
    if not isinstance(value, list):
        raise ValueError("open-set family must be a list of index lists or 'discrete'")
    return FiniteTopology(n, [bits.from_indices(int(i) for i in o) for o in value])


def cts_from_json(data) -> Cts:
    if not isinstance(data, dict) or "context" not in data:
        raise ValueError("CTS JSON must be an object with a 'context' key")
    ctx = context_from_json(data["context"])
    return Cts(ctx, _opens_from_json(data.get("object_opens", "discrete"), ctx.n_objects),
               _opens_from_json(data.get("attribute_opens", "discrete"), ctx.n_attributes))
