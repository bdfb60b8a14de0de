"""Filters and ideals of a finite dBa, primary ones, and the standard context.

Subsets of a carrier are numpy boolean vectors of length ``n``.  Primary
filters are indexed by the atoms of the ⊓-idempotent Boolean part (in
carrier order), primary ideals by the coatoms of the ⊔-idempotent part.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import bits
from .context import FormalContext, derive_extent, derive_intent
from .dba import DbaHom, FiniteDba, InvalidDbaError, boolean_reducts

SCAN_LIMIT = 16


class InconsistencyError(RuntimeError):
    """A search guaranteed to succeed on a valid dBa came back empty."""


def _members(d: FiniteDba, S) -> np.ndarray:
    if isinstance(S, CarrierSubset):
        if S.dba is not d:
            raise ValueError("subset belongs to a different algebra")
        return S.members
    arr = np.asarray(S)
    if arr.dtype == bool:
        if arr.shape != (d.n,):
            raise ValueError(f"membership vector has shape {arr.shape}, expected ({d.n},)")
        return arr
    out = np.zeros(d.n, dtype=bool)
    idx = np.asarray(list(S) if not isinstance(S, np.ndarray) else S, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= d.n):
        raise ValueError("element index out of range")
    out[idx] = True
    return out


def _meet_closed(d: FiniteDba, m: np.ndarray, table: np.ndarray) -> bool:
    idx = np.flatnonzero(m)
    return bool(m[table[np.ix_(idx, idx)]].all())


def is_filter(d: FiniteDba, S) -> bool:
    m = _members(d, S)
    idx = np.flatnonzero(m)
    return _meet_closed(d, m, d.meet) and not (d.leq[idx] & ~m).any()


def is_ideal(d: FiniteDba, S) -> bool:
    m = _members(d, S)
    idx = np.flatnonzero(m)
    return _meet_closed(d, m, d.join) and not (d.leq[:, idx].T & ~m).any()


def is_primary_filter(d: FiniteDba, S) -> bool:
    m = _members(d, S)
    return is_filter(d, m) and not m.all() and bool((m | m[d.neg]).all())


def is_primary_ideal(d: FiniteDba, S) -> bool:
    m = _members(d, S)
    return is_ideal(d, m) and not m.all() and bool((m | m[d.opp]).all())


@dataclass(frozen=True, eq=False)
class CarrierSubset:
    dba: FiniteDba
    members: np.ndarray
    kind: str  # "filter" or "ideal"
    valid: bool
    proper: bool
    primary: bool

    def __eq__(self, other):
        return (isinstance(other, CarrierSubset) and other.dba is self.dba and other.kind == self.kind
                and np.array_equal(other.members, self.members))

    def __hash__(self):
        return hash((id(self.dba), self.kind, self.members.tobytes()))

    def __contains__(self, x: int) -> bool:
        return bool(self.members[x])

    def elements(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.members)]


def carrier_subset(d: FiniteDba, S, kind: str) -> CarrierSubset:
    m = np.array(_members(d, S), dtype=bool)
    m.setflags(write=False)
    if kind == "filter":
        valid, primary = is_filter(d, m), is_primary_filter(d, m)
    elif kind == "ideal":
        valid, primary = is_ideal(d, m), is_primary_ideal(d, m)
    else:
        raise ValueError(f"kind must be 'filter' or 'ideal', not {kind!r}")
    return CarrierSubset(d, m, kind, valid, not m.all(), primary)


def _saturate(d: FiniteDba, X, table: np.ndarray, order: np.ndarray) -> np.ndarray:
    m = _members(d, X).copy()
    if not m.any():
        raise ValueError("generating set must be non-empty")
    while True:
        idx = np.flatnonzero(m)
        grown = m.copy()
        grown[table[np.ix_(idx, idx)].ravel()] = True
        grown |= order[np.flatnonzero(grown)].any(axis=0)
        if np.array_equal(grown, m):
            return m
        m = grown


def generate_filter(d: FiniteDba, X) -> CarrierSubset:
    """Smallest filter containing the non-empty set ``X``."""
    return carrier_subset(d, _saturate(d, X, d.meet, d.leq), "filter")


def generate_ideal(d: FiniteDba, X) -> CarrierSubset:
    return carrier_subset(d, _saturate(d, X, d.join, d.leq.T), "ideal")


# primary filters and ideals


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Primary filters and ideals of one dBa, with the element loci."""
    dba: FiniteDba
    atoms: tuple[int, ...]
    coatoms: tuple[int, ...]
    filter_matrix: np.ndarray  # (filters, n) membership
    ideal_matrix: np.ndarray   # (ideals, n) membership

    @property
    def n_filters(self) -> int:
        return len(self.atoms)

    @property
    def n_ideals(self) -> int:
        return len(self.coatoms)

    @cached_property
    def filter_loci(self) -> tuple[int, ...]:
        """Bit i of entry x is set when x lies in primary filter i."""
        return _column_masks(self.filter_matrix)

    @cached_property
    def ideal_loci(self) -> tuple[int, ...]:
        return _column_masks(self.ideal_matrix)

    @cached_property
    def _filter_index(self) -> dict[bytes, int]:
        return {row.tobytes(): i for i, row in enumerate(self.filter_matrix)}

    @cached_property
    def _ideal_index(self) -> dict[bytes, int]:
        return {row.tobytes(): i for i, row in enumerate(self.ideal_matrix)}

    def filter_index(self, members: np.ndarray) -> int | None:
        return self._filter_index.get(np.asarray(members, dtype=bool).tobytes())

    def ideal_index(self, members: np.ndarray) -> int | None:
        return self._ideal_index.get(np.asarray(members, dtype=bool).tobytes())

    def filters(self) -> list[CarrierSubset]:
        return [carrier_subset(self.dba, row, "filter") for row in self.filter_matrix]

    def ideals(self) -> list[CarrierSubset]:
        return [carrier_subset(self.dba, row, "ideal") for row in self.ideal_matrix]

    @cached_property
    def filter_labels(self) -> tuple[str, ...]:
        return tuple(f"F@{self.dba.labels[a]}" for a in self.atoms)

    @cached_property
    def ideal_labels(self) -> tuple[str, ...]:
        return tuple(f"I@{self.dba.labels[b]}" for b in self.coatoms)

    @cached_property
    def meets(self) -> np.ndarray:
        """(filters, ideals) matrix: filter i and ideal j share an element."""
        f = self.filter_matrix.astype(np.int32)
        g = self.ideal_matrix.astype(np.int32)
        return (f @ g.T) > 0


def _column_masks(matrix: np.ndarray) -> tuple[int, ...]:
    out = []
    for col in matrix.T:
        out.append(bits.from_indices(np.flatnonzero(col).tolist()))
    return tuple(out)


_spectra: "weakref.WeakKeyDictionary[FiniteDba, Spectrum]" = weakref.WeakKeyDictionary()


def spectrum(d: FiniteDba, verify: bool = True) -> Spectrum:
    """Primary filters (up-sets of atoms) and ideals (down-sets of coatoms).

    With ``verify`` each one is checked against the definition, and for
    carriers of at most ``SCAN_LIMIT`` elements the lists are compared with
    an exhaustive scan of all subsets.
    """
    cached = _spectra.get(d)
    if cached is not None:
        return cached
    lo, hi = boolean_reducts(d)
    fm = np.array([d.leq[a, :] for a in lo.extremal], dtype=bool).reshape(len(lo.extremal), d.n)
    im = np.array([d.leq[:, b] for b in hi.extremal], dtype=bool).reshape(len(hi.extremal), d.n)
    fm.setflags(write=False)
    im.setflags(write=False)
    spec = Spectrum(d, lo.extremal, hi.extremal, fm, im)
    if verify:
        for row in fm:
            if not is_primary_filter(d, row):
                raise InvalidDbaError("up-set of an atom is not a primary filter")
        for row in im:
            if not is_primary_ideal(d, row):
                raise InvalidDbaError("down-set of a coatom is not a primary ideal")
        if d.n <= SCAN_LIMIT:
            scanned_f, scanned_i = primary_by_scan(d)
            if _rowset(scanned_f) != _rowset(fm) or _rowset(scanned_i) != _rowset(im):
                raise InconsistencyError("atom route and definitional scan disagree")
    _spectra[d] = spec
    return spec


def _rowset(matrix: np.ndarray) -> set[bytes]:
    return {row.tobytes() for row in np.asarray(matrix, dtype=bool)}


def primary_by_scan(d: FiniteDba) -> tuple[np.ndarray, np.ndarray]:
    """All primary filters and ideals found by testing every subset of the carrier."""
    if d.n > SCAN_LIMIT:
        raise ValueError(f"definitional scan limited to {SCAN_LIMIT} elements")
    n = d.n
    codes = np.arange(1 << n, dtype=np.int64)
    S = ((codes[:, None] >> np.arange(n)) & 1).astype(bool)
    proper = ~S.all(axis=1)
    out = []
    for table, comp, up in ((d.meet, d.neg, d.leq), (d.join, d.opp, d.leq.T)):
        ok = proper & (S | S[:, comp]).all(axis=1)
        for x in range(n):
            ok &= ~S[:, x] | (S | ~up[x][None, :]).all(axis=1)
            for y in range(n):
                ok &= ~(S[:, x] & S[:, y]) | S[:, table[x, y]]
        out.append(S[ok])
    return out[0], out[1]


def enumerate_primary_filters(d: FiniteDba) -> list[CarrierSubset]:
    return spectrum(d).filters()


def enumerate_primary_ideals(d: FiniteDba) -> list[CarrierSubset]:
    return spectrum(d).ideals()


def filter_locus(d: FiniteDba, x: int) -> int:
    """Mask over primary filters containing ``x``."""
    if not 0 <= x < d.n:
        raise ValueError(f"element {x} out of range")
    return spectrum(d).filter_loci[x]


def ideal_locus(d: FiniteDba, x: int) -> int:
    if not 0 <= x < d.n:
        raise ValueError(f"element {x} out of range")
    return spectrum(d).ideal_loci[x]


def separate_filter_ideal(d: FiniteDba, F, I) -> tuple[CarrierSubset, CarrierSubset]:
    """Primary filter ⊇ F and primary ideal ⊇ I that stay disjoint."""
    f, i = _members(d, F), _members(d, I)
    if not is_filter(d, f):
        raise ValueError("first argument is not a filter")
    if not is_ideal(d, i):
        raise ValueError("second argument is not an ideal")
    if (f & i).any():
        raise ValueError("filter and ideal intersect")
    spec = spectrum(d)
    for frow in spec.filter_matrix:
        if (f & ~frow).any():
            continue
        for irow in spec.ideal_matrix:
            if not (i & ~irow).any() and not (frow & irow).any():
                return carrier_subset(d, frow, "filter"), carrier_subset(d, irow, "ideal")
    raise InconsistencyError("no separating primary pair exists for a disjoint filter and ideal")


def extend_to_primary(d: FiniteDba, S: CarrierSubset) -> CarrierSubset:
    m = _members(d, S)
    if not S.valid or not S.proper:
        raise ValueError("only proper filters or ideals extend to primary ones")
    spec = spectrum(d)
    rows = spec.filter_matrix if S.kind == "filter" else spec.ideal_matrix
    for row in rows:
        if not (m & ~row).any():
            return carrier_subset(d, row, S.kind)
    raise InconsistencyError(f"proper {S.kind} has no primary extension")


def standard_context(d: FiniteDba) -> FormalContext:
    """Primary filters × primary ideals, related when they intersect."""
    spec = spectrum(d)
    return FormalContext.from_matrix(spec.filter_labels, spec.ideal_labels, spec.meets)


def standard_complement(d: FiniteDba) -> FormalContext:
    """Primary filters × primary ideals, related when they are disjoint."""
    spec = spectrum(d)
    return FormalContext.from_matrix(spec.filter_labels, spec.ideal_labels, ~spec.meets)


def hom_preimage_maps(h: DbaHom) -> tuple[list[int], list[int]]:
    """Pull primary filters and ideals of the target back along ``h``.

    Returns index maps: target filter i goes to source filter ``alpha[i]``,
    target ideal j to source ideal ``beta[j]``.
    """
    if not h.homomorphism:
        raise ValueError(f"not a homomorphism: {h.failure}")
    src, dst = spectrum(h.source), spectrum(h.target)
    hmap = np.asarray(h.map)
    alpha, beta = [], []
    for rows, pulled, find in ((dst.filter_matrix, alpha, src.filter_index),
                               (dst.ideal_matrix, beta, src.ideal_index)):
        for row in rows:
            k = find(row[hmap])
            if k is None:
                raise InconsistencyError("preimage of a primary subset is not primary")
            pulled.append(k)
    return alpha, beta


def direct_image(h: DbaHom, S) -> np.ndarray:
    m = _members(h.source, S)
    out = np.zeros(h.target.n, dtype=bool)
    out[np.asarray(h.map)[m]] = True
    return out


def locus_identity_failures(d: FiniteDba) -> dict[str, list]:
    """Failing instances of the algebraic identities between loci."""
    spec = spectrum(d)
    F, I = spec.filter_loci, spec.ideal_loci
    ctx = standard_context(d)
    all_f, all_i = bits.full(spec.n_filters), bits.full(spec.n_ideals)
    M, J, N, O = d.meet, d.join, d.neg, d.opp
    mx, jx = d.meet_square, d.join_square
    out: dict[str, list] = {}

    def fail(name, wit):
        lst = out.setdefault(name, [])
        if len(lst) < 10:
            lst.append(wit)

    for x in range(d.n):
        if derive_intent(ctx, F[x]) != I[J[mx[x], mx[x]]]:
            fail("filter-locus-derivation", (x,))
        if derive_extent(ctx, I[x]) != F[M[jx[x], jx[x]]]:
            fail("ideal-locus-derivation", (x,))
        if all_f ^ F[x] != F[N[x]]:
            fail("filter-locus-complement", (x,))
        if all_i ^ I[x] != I[O[x]]:
            fail("ideal-locus-complement", (x,))
        if I[jx[x]] != I[x]:
            fail("ideal-locus-square", (x,))
        if F[mx[x]] != F[x]:
            fail("filter-locus-square", (x,))
        if F[N[x]] != F[N[mx[x]]]:
            fail("neg-locus-square", (x,))
    for name, loci, table in (("filter-locus-intersection", F, M), ("ideal-locus-intersection", I, J)):
        arr = np.array(loci, dtype=np.int64 if len(loci) and max(loci).bit_length() < 63 else object)
        bad = np.argwhere((arr[:, None] & arr[None, :]) != arr[table])
        for x, y in bad[:10]:
            fail(name, (int(x), int(y)))
    return out
