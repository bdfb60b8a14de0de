"""Representation of finite dBas by clopen pairs of their primary-filter context.

Every check here returns a structured report: a verdict plus the first
counterexample found, so a failing run says what broke.
"""

from __future__ import annotations

import hashlib
import json
import time
import weakref
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import bits
from .concepts import ConceptDba, build_wille_proto_dba, build_wille_semi_dba
from .context import FormalContext, black_box, black_diamond, box, diamond, preimage_set
from .dba import (DbaClass, DbaHom, FiniteDba, InvalidDbaError, boolean_reducts, check_hom,
                  classify_dba, compose, extend_pure_iso, identity_hom, pure_indices)
from .filters import hom_preimage_maps, spectrum, standard_complement, standard_context
from .topology import (Cts, CtsClass, CtsHom, check_cts_morphism, clopen_proto_dba, clopen_semi_dba,
                       generate_from_closed_subbase, induced_dba_iso)

REPRESENTATION_CAP = 24  # atoms + coatoms


class TheoremViolation(AssertionError):
    """A finite instance contradicts a statement that should hold for it."""


class RepresentationCapError(RuntimeError):
    pass


def digest(obj) -> str:
    """Short content hash of a JSON-serialisable value."""
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


_digests: "weakref.WeakKeyDictionary[FiniteDba, str]" = weakref.WeakKeyDictionary()


def dba_digest(d: FiniteDba) -> str:
    """Short hash of the operation tables."""
    if d not in _digests:
        h = hashlib.sha256(f"{d.n}:{d.top}:{d.bot}:".encode())
        for table in (d.meet, d.join, d.neg, d.opp):
            h.update(np.ascontiguousarray(table, dtype="<i4").tobytes())
        _digests[d] = h.hexdigest()[:16]
    return _digests[d]


@dataclass
class TheoremReport:
    theorem: str
    verdict: bool
    counterexample: Any = None
    details: dict = field(default_factory=dict)
    input: str = ""
    elapsed_ms: int = 0

    def __bool__(self) -> bool:
        return self.verdict

    def to_json(self) -> dict:
        out = {"theorem": self.theorem, "input": self.input, "verdict": self.verdict,
               "counterexample": self.counterexample, "elapsed_ms": self.elapsed_ms}
        if self.details:
            out["details"] = self.details
        return out


def _report(theorem: str, failures: dict[str, Any], details: dict | None = None, source=None) -> TheoremReport:
    first = None
    for name, wit in failures.items():
        if wit:
            first = {"check": name, "witness": wit}
            break
    return TheoremReport(theorem, first is None, first, details or {},
                         dba_digest(source) if isinstance(source, FiniteDba) else "")


def timed(fn, *args, **kwargs) -> TheoremReport:
    t0 = time.perf_counter()
    rep = fn(*args, **kwargs)
    rep.elapsed_ms = int((time.perf_counter() - t0) * 1000)
    return rep


# the primary-filter context


_kpr_cache: "weakref.WeakKeyDictionary[FiniteDba, Cts]" = weakref.WeakKeyDictionary()


def check_size(d: FiniteDba, cap: int | None = None, force: bool = False) -> None:
    if cap is not None and cap > REPRESENTATION_CAP and not force:
        raise RepresentationCapError(f"raising the cap above {REPRESENTATION_CAP} needs force")
    limit = REPRESENTATION_CAP if cap is None else cap
    spec = spectrum(d)
    if spec.n_filters + spec.n_ideals > limit:
        raise RepresentationCapError(
            f"{spec.n_filters} atoms + {spec.n_ideals} coatoms exceeds the limit {limit}")


def build_kpr_cts(d: FiniteDba, cap: int | None = None, force: bool = False) -> Cts:
    """Primary filters × primary ideals under ∇, topologised by the element loci."""
    check_size(d, cap, force)
    cached = _kpr_cache.get(d)
    if cached is not None:
        return cached
    spec = spectrum(d)
    ctx = standard_complement(d)
    tau = generate_from_closed_subbase(spec.n_filters, spec.filter_loci)
    rho = generate_from_closed_subbase(spec.n_ideals, spec.ideal_loci)
    if not (tau.is_discrete and rho.is_discrete):
        raise TheoremViolation("topologies of a finite dBa's filter context are not discrete")
    cts = Cts(ctx, tau, rho)
    if not cts.is_ctscr:
        raise TheoremViolation("filter context is not continuous in both directions")
    if not cts.is_stone:
        raise TheoremViolation("filter context is not a Stone context")
    _kpr_cache[d] = cts
    return cts


def kpr_algebras(d: FiniteDba, cap=None, force=False) -> tuple[Cts, ConceptDba, ConceptDba]:
    cts = build_kpr_cts(d, cap, force)
    return cts, _cached_proto(cts), _cached_semi(cts)


_proto_cache: "weakref.WeakKeyDictionary[Cts, ConceptDba]" = weakref.WeakKeyDictionary()
_semi_cache: "weakref.WeakKeyDictionary[Cts, ConceptDba]" = weakref.WeakKeyDictionary()


def _cached_proto(cts: Cts) -> ConceptDba:
    if cts not in _proto_cache:
        _proto_cache[cts] = clopen_proto_dba(cts)
    return _proto_cache[cts]


def _cached_semi(cts: Cts) -> ConceptDba:
    if cts not in _semi_cache:
        _semi_cache[cts] = clopen_semi_dba(cts)
    return _semi_cache[cts]


def oo_images(d: FiniteDba) -> list[tuple[int, int]]:
    """x ↦ (F_¬x, I_x) as (filter mask, ideal mask)."""
    spec = spectrum(d)
    F, I = spec.filter_loci, spec.ideal_loci
    return [(F[int(d.neg[x])], I[x]) for x in range(d.n)]


# representation maps


@dataclass
class RepresentationReport:
    dba: FiniteDba
    cts: Cts
    target: ConceptDba
    images: list[tuple[int, int]]
    hom: DbaHom | None
    classification: DbaClass
    report: TheoremReport

    @property
    def homomorphism(self) -> bool:
        return self.hom is not None and self.hom.homomorphism

    @property
    def quasi_injective(self) -> bool:
        return self.hom is not None and self.hom.quasi_injective

    @property
    def injective(self) -> bool:
        return self.hom is not None and self.hom.injective

    @property
    def surjective(self) -> bool:
        return self.hom is not None and self.hom.surjective

    @property
    def verdict(self) -> bool:
        return self.report.verdict

    def verdicts(self) -> dict[str, bool]:
        return {"homomorphism": self.homomorphism, "quasi_injective": self.quasi_injective,
                "injective": self.injective, "surjective": self.surjective}


def _map_into(target: ConceptDba, images) -> tuple[list[int] | None, Any]:
    mapping = []
    for x, (A, B) in enumerate(images):
        k = target.find(A, B)
        if k is None:
            return None, x
        mapping.append(k)
    return mapping, None


def rep_map_oo(d: FiniteDba, cap=None, force=False) -> RepresentationReport:
    """Check x ↦ (F_¬x, I_x) against the classification of ``d``.

    Expected: always a quasi-injective homomorphism into the clopen
    protoconcept algebra; injective exactly when ``d`` is contextual; an
    isomorphism exactly when fully contextual; for pure ``d`` an
    isomorphism onto the clopen semiconcept algebra.
    """
    cls = classify_dba(d)
    cts, target, semi = kpr_algebras(d, cap, force)
    images = oo_images(d)
    mapping, missing = _map_into(target, images)
    failures: dict[str, Any] = {"image-not-clopen-protoconcept": None if missing is None else [missing]}
    hom = None
    if mapping is not None:
        hom = check_hom(d, target, mapping)
        failures["homomorphism"] = None if hom.homomorphism else list(hom.failure)
        failures["quasi-injective"] = None if hom.quasi_injective else ["order not reflected"]
        failures["injective-iff-contextual"] = (
            None if hom.injective == cls.contextual
            else [f"injective={hom.injective} contextual={cls.contextual}"])
        iso = hom.isomorphism
        failures["iso-iff-fully-contextual"] = (
            None if iso == cls.fully_contextual
            else [f"isomorphism={iso} fully_contextual={cls.fully_contextual}"])
        if cls.pure:
            onto_semi = None
            semi_map, miss = _map_into(semi, images)
            if semi_map is None:
                onto_semi = [f"image of {miss} is not a clopen semiconcept"]
            else:
                hs = check_hom(d, semi, semi_map)
                if not hs.isomorphism:
                    onto_semi = [hs.failure or "not bijective onto the clopen semiconcepts"]
            failures["pure-iso-onto-semiconcepts"] = onto_semi
    details = {"filters": cts.context.n_objects, "ideals": cts.context.n_attributes,
               "target_size": target.n, "classification": cls._asdict()}
    rep = _report("representation", failures, details, d)
    if hom is not None:
        details.update(homomorphism=hom.homomorphism, quasi_injective=hom.quasi_injective,
                       injective=hom.injective, surjective=hom.surjective)
    return RepresentationReport(d, cts, target, images, hom, cls, rep)


def rep_map_wille(d: FiniteDba) -> RepresentationReport:
    """x ↦ (F_x, I_x) into the protoconcepts of the intersecting-pairs context."""
    cls = classify_dba(d)
    spec = spectrum(d)
    ctx = standard_context(d)
    target = build_wille_proto_dba(ctx)
    F, I = spec.filter_loci, spec.ideal_loci
    images = [(F[x], I[x]) for x in range(d.n)]
    mapping, missing = _map_into(target, images)
    failures: dict[str, Any] = {"image-not-protoconcept": None if missing is None else [missing]}
    hom = None
    if mapping is not None:
        hom = check_hom(d, target, mapping)
        failures["homomorphism"] = None if hom.homomorphism else list(hom.failure)
        failures["quasi-injective"] = None if hom.quasi_injective else ["order not reflected"]
    # complementing extents must give the object-oriented map
    full = ctx.all_objects
    oo = oo_images(d)
    bad = [x for x, (A, B) in enumerate(images) if (full ^ A, B) != oo[x]]
    failures["transport-consistency"] = bad[:10] or None
    rep = _report("representation-classical", failures, {"target_size": target.n}, d)
    cts = Cts.discrete(ctx)
    return RepresentationReport(d, cts, target, images, hom, cls, rep)


@dataclass
class AtomRepresentation:
    context: FormalContext
    hom: DbaHom | None
    complement_images: list[tuple[int, int]]
    report: TheoremReport


def atom_coatom_context(d: FiniteDba) -> FormalContext:
    """Atoms of the ⊓-part × coatoms of the ⊔-part, related by ⊑."""
    lo, hi = boolean_reducts(d)
    rows = np.array([[d.leq[a, b] for b in hi.extremal] for a in lo.extremal], dtype=bool)
    rows = rows.reshape(len(lo.extremal), len(hi.extremal))
    return FormalContext.from_matrix([f"a@{d.labels[a]}" for a in lo.extremal],
                                     [f"c@{d.labels[b]}" for b in hi.extremal], rows)


def finite_rep_atoms(d: FiniteDba) -> AtomRepresentation:
    """Atom/coatom form of the representation and its agreement with the filter form."""
    lo, hi = boolean_reducts(d)
    kac = atom_coatom_context(d)
    atoms, coatoms = lo.extremal, hi.extremal
    down = [bits.from_indices(i for i, a in enumerate(atoms) if d.leq[a, x]) for x in range(d.n)]
    up = [bits.from_indices(j for j, b in enumerate(coatoms) if d.leq[x, b]) for x in range(d.n)]
    target = build_wille_proto_dba(kac)
    mapping, missing = _map_into(target, list(zip(down, up)))
    failures: dict[str, Any] = {"image-not-protoconcept": None if missing is None else [missing]}
    hom = None
    if mapping is not None:
        hom = check_hom(d, target, mapping)
        failures["homomorphism"] = None if hom.homomorphism else list(hom.failure)
        failures["quasi-injective"] = None if hom.quasi_injective else ["order not reflected"]
    # same contexts once atoms stand for their filters and coatoms for their ideals
    nabla = standard_complement(d)
    same_context = [g for g in range(kac.n_objects)
                    if kac.rows[g] ^ bits.full(kac.n_attributes) != nabla.rows[g]]
    failures["context-matches-filter-context"] = same_context[:10] or None
    full = bits.full(len(atoms))
    complement_images = [(full ^ down[x], up[x]) for x in range(d.n)]
    oo = oo_images(d)
    failures["complement-form-matches-filter-form"] = \
        [x for x in range(d.n) if complement_images[x] != oo[x]][:10] or None
    if hom is not None and classify_dba(d).pure:
        semi = build_wille_semi_dba(kac)
        semi_map, miss = _map_into(semi, list(zip(down, up)))
        ok = semi_map is not None and check_hom(d, semi, semi_map).isomorphism
        failures["pure-iso-onto-semiconcepts"] = None if ok else ["not an isomorphism"]
    details = {"atoms": len(atoms), "coatoms": len(coatoms)}
    if hom is not None:
        details.update(homomorphism=hom.homomorphism, quasi_injective=hom.quasi_injective,
                       injective=hom.injective, surjective=hom.surjective)
    return AtomRepresentation(kac, hom, complement_images,
                              _report("representation-atoms", failures, details, d))


def characterize_pure_part(d: FiniteDba) -> TheoremReport:
    """Pure part of the clopen protoconcept algebra equals the image of D_p."""
    _, target, _ = kpr_algebras(d)
    images = oo_images(d)
    meet_idem = {images[x] for x in np.flatnonzero(d.meet_idempotent)}
    join_idem = {images[x] for x in np.flatnonzero(d.join_idempotent)}
    t_meet = {target.pairs[i] for i in np.flatnonzero(target.meet_idempotent)}
    t_join = {target.pairs[i] for i in np.flatnonzero(target.join_idempotent)}
    failures = {
        "meet-idempotents": sorted(t_meet ^ meet_idem)[:10] or None,
        "join-idempotents": sorted(t_join ^ join_idem)[:10] or None,
    }
    return _report("pure-part-characterization", failures,
                   {"pure_size": len(t_meet | t_join)}, d)


def clopen_identity_failures(d: FiniteDba) -> dict[str, list]:
    """Modal operators of the ∇ context applied to element loci."""
    spec = spectrum(d)
    F, I = spec.filter_loci, spec.ideal_loci
    ctx = standard_complement(d)
    N, O = d.neg, d.opp
    out: dict[str, list] = {}
    for x in range(d.n):
        mx, jx = int(d.meet_square[x]), int(d.join_square[x])
        checks = (
            ("filter-locus-black-box", black_box(ctx, F[x]) == I[N[x]]),
            ("filter-locus-black-diamond", black_diamond(ctx, F[x]) == I[O[mx]]),
            ("ideal-locus-box", box(ctx, I[x]) == F[O[x]]),
            ("ideal-locus-diamond", diamond(ctx, I[x]) == F[N[jx]]),
        )
        for name, ok in checks:
            if not ok:
                out.setdefault(name, []).append((x,))
    # the relation is recovered from the pure clopen pairs
    _, target, _ = kpr_algebras(d)
    pure = [target.pairs[i] for i in pure_indices(target)]
    for f in range(ctx.n_objects):
        for i in range(ctx.n_attributes):
            forced = all(A >> f & 1 for A, B in pure if B >> i & 1)
            if forced != ctx.incident(f, i):
                out.setdefault("relation-from-pure-pairs", []).append((f, i))
    return out


# Stone contexts and the round trip


@dataclass
class KMaps:
    k1: list[int]
    k2: list[int]
    hom: CtsHom | None
    induced: DbaHom | None
    report: TheoremReport


def k_maps(stone: Cts) -> KMaps:
    """Send g to {(A,B) : g ∉ A} and m to {(A,B) : m ∈ B} over clopen semiconcepts."""
    if not stone.is_stone:
        raise ValueError("input is not a Stone context")
    semi = clopen_semi_dba(stone)
    kpr = build_kpr_cts(semi)
    spec = spectrum(semi)
    ctx = stone.context
    k1, k2 = [], []
    failures: dict[str, Any] = {}
    for g in range(ctx.n_objects):
        k = spec.filter_index(np.array([not (A >> g & 1) for A, _ in semi.pairs], dtype=bool))
        if k is None:
            failures.setdefault("object-not-primary-filter", []).append(g)
        k1.append(k)
    for m in range(ctx.n_attributes):
        k = spec.ideal_index(np.array([bool(B >> m & 1) for _, B in semi.pairs], dtype=bool))
        if k is None:
            failures.setdefault("attribute-not-primary-ideal", []).append(m)
        k2.append(k)
    hom = induced = None
    if not failures:
        hom = check_cts_morphism(stone, kpr, k1, k2)
        if hom.verdict != CtsClass.HOMEOMORPHISM:
            failures["homeomorphism"] = [hom.verdict.name.lower()]
        else:
            induced = induced_dba_iso(hom, stone, kpr)
            failures["induced-iso"] = None if induced.isomorphism else [induced.failure]
            induced_semi = induced_dba_iso(hom, stone, kpr, semi=True)
            failures["induced-iso-semiconcepts"] = None if induced_semi.isomorphism else [induced_semi.failure]
    rep = _report("stone-roundtrip", failures,
                  {"objects": ctx.n_objects, "attributes": ctx.n_attributes, "semiconcepts": semi.n})
    return KMaps(k1, k2, hom, induced, rep)


# functors


_pure_cache: "weakref.WeakKeyDictionary[FiniteDba, FiniteDba]" = weakref.WeakKeyDictionary()


def cached_pure_part(d: FiniteDba) -> FiniteDba:
    if d not in _pure_cache:
        _pure_cache[d] = d.restrict(pure_indices(d))
    return _pure_cache[d]


def functor_G(f: DbaHom) -> tuple[FiniteDba, DbaHom]:
    """Restrict an isomorphism of fully contextual dBas to their pure parts."""
    if not f.isomorphism:
        raise ValueError("expected an isomorphism")
    for d in (f.source, f.target):
        if not classify_dba(d).fully_contextual:
            raise InvalidDbaError("expected fully contextual algebras")
    src, dst = cached_pure_part(f.source), cached_pure_part(f.target)
    ps, pt = pure_indices(f.source), pure_indices(f.target)
    local = {int(v): k for k, v in enumerate(pt)}
    try:
        mapping = [local[f.map[int(x)]] for x in ps]
    except KeyError as exc:
        raise TheoremViolation("isomorphism moves a pure element out of the pure part") from exc
    g = check_hom(src, dst, mapping)
    if not g.isomorphism:
        raise TheoremViolation(f"restriction to pure parts is not an isomorphism: {g.failure}")
    return src, g


def functor_F(f: DbaHom) -> CtsHom:
    """Pull primary filters and ideals back along an isomorphism of pure dBas.

    The result maps the filter context of the target to that of the source.
    """
    if not f.isomorphism:
        raise ValueError("expected an isomorphism")
    for d in (f.source, f.target):
        if not classify_dba(d).pure:
            raise InvalidDbaError("expected pure algebras")
    alpha, beta = hom_preimage_maps(f)
    return check_cts_morphism(build_kpr_cts(f.target), build_kpr_cts(f.source), alpha, beta)


def square_failures(f: DbaHom, pulled: CtsHom) -> list[int]:
    """Elements x where the image of f(x) differs from the transport of the image of x."""
    src_img, dst_img = oo_images(f.source), oo_images(f.target)
    bad = []
    for x in range(f.source.n):
        A, B = src_img[x]
        if dst_img[f.map[x]] != (preimage_set(pulled.alpha, A), preimage_set(pulled.beta, B)):
            bad.append(x)
    return bad


def functor_G_laws(homs: Sequence[DbaHom], pairs: Sequence[tuple[DbaHom, DbaHom]] = ()) -> TheoremReport:
    """Identity and composition laws of pure-part restriction on given maps.

    ``pairs`` holds (f, g) with g ∘ f defined.
    """
    failures: dict[str, Any] = {}
    for k, f in enumerate(homs):
        if not f.isomorphism:
            continue
        src, g = functor_G(identity_hom(f.source))
        if g.map != tuple(range(src.n)):
            failures.setdefault("identity", []).append(k)
        # extending the restriction back recovers f
        _, gf = functor_G(f)
        ps, pt = pure_indices(f.source), pure_indices(f.target)
        h = {int(ps[i]): int(pt[j]) for i, j in enumerate(gf.map)}
        if extend_pure_iso(f.source, f.target, h).map != f.map:
            failures.setdefault("extension-recovers", []).append(k)
    for k, (f, g) in enumerate(pairs):
        _, G_f = functor_G(f)
        _, G_g = functor_G(g)
        _, G_gf = functor_G(compose(g, f))
        if compose(G_g, G_f).map != G_gf.map:
            failures.setdefault("composition", []).append(k)
    return _report("functor-pure-part", failures, {"maps": len(homs), "pairs": len(pairs)})


def functor_F_laws(homs: Sequence[DbaHom], pairs: Sequence[tuple[DbaHom, DbaHom]] = ()) -> TheoremReport:
    """Contravariance, homeomorphism, commuting square and faithfulness on given maps."""
    failures: dict[str, Any] = {}
    pulled_by_map: dict[tuple, tuple] = {}
    for k, f in enumerate(homs):
        pulled = functor_F(f)
        if pulled.verdict != CtsClass.HOMEOMORPHISM:
            failures.setdefault("homeomorphism", []).append(k)
            continue
        bad = square_failures(f, pulled)
        if bad:
            failures.setdefault("square", []).append((k, bad[0]))
        if f.source is f.target:
            key = (pulled.alpha, pulled.beta)
            other = pulled_by_map.setdefault(key, f.map)
            if other != f.map:
                failures.setdefault("faithful", []).append(k)
        if f.map == tuple(range(f.source.n)) and f.source is f.target:
            if pulled.alpha != tuple(range(len(pulled.alpha))) or pulled.beta != tuple(range(len(pulled.beta))):
                failures.setdefault("identity", []).append(k)
    for k, (f, g) in enumerate(pairs):
        F_f, F_g, F_gf = functor_F(f), functor_F(g), functor_F(compose(g, f))
        alpha = tuple(F_f.alpha[a] for a in F_g.alpha)
        beta = tuple(F_f.beta[b] for b in F_g.beta)
        if (alpha, beta) != (F_gf.alpha, F_gf.beta):
            failures.setdefault("contravariance", []).append(k)
    return _report("functor-filter-context", failures, {"maps": len(homs), "pairs": len(pairs)})


def automorphisms(d: FiniteDba, limit: int | None = None) -> list[DbaHom]:
    """Automorphisms of a small dBa by backtracking over label-free invariants."""
    n = d.n
    invariant = [(bool(d.meet_idempotent[x]), bool(d.join_idempotent[x]),
                  int(d.leq[x].sum()), int(d.leq[:, x].sum())) for x in range(n)]
    fixed = {int(d.top): int(d.top), int(d.bot): int(d.bot)}
    order = sorted(range(n), key=lambda x: (x not in fixed, x))
    found: list[DbaHom] = []

    def consistent(assign: dict[int, int]) -> bool:
        for x, y in assign.items():
            for u, v in assign.items():
                m = int(d.meet[x, u])
                if m in assign and assign[m] != d.meet[y, v]:
                    return False
                j = int(d.join[x, u])
                if j in assign and assign[j] != d.join[y, v]:
                    return False
            if int(d.neg[x]) in assign and assign[int(d.neg[x])] != d.neg[y]:
                return False
            if int(d.opp[x]) in assign and assign[int(d.opp[x])] != d.opp[y]:
                return False
        return True

    def extend(i: int, assign: dict[int, int], used: set[int]):
        if limit is not None and len(found) >= limit:
            return
        if i == n:
            h = check_hom(d, d, [assign[x] for x in range(n)])
            if h.isomorphism:
                found.append(h)
            return
        x = order[i]
        choices = [fixed[x]] if x in fixed else range(n)
        for y in choices:
            if y in used or invariant[y] != invariant[x]:
                continue
            assign[x] = y
            used.add(y)
            if consistent(assign):
                extend(i + 1, assign, used)
            del assign[x]
            used.discard(y)

    extend(0, {}, set())
    return found
