"""Finite double Boolean algebras given by explicit operation tables.

Elements are indices ``0..n-1``.  ``meet``/``join`` are ``n x n`` tables,
``neg``/``opp`` are length-``n`` tables, ``top``/``bot`` are indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

WITNESS_CAP = 10


class DbaFormatError(ValueError):
    """Tables have the wrong shape or out-of-range entries."""


class InvalidDbaError(ValueError):
    """Tables are well formed but violate a law every dBa satisfies."""


class ClosureError(InvalidDbaError):
    pass


def _freeze(arr, shape, n, what):
    arr = np.array(arr, dtype=np.int32)
    if arr.shape != shape:
        raise DbaFormatError(f"{what} table has shape {arr.shape}, expected {shape}")
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise DbaFormatError(f"{what} table has entries outside [0, {n})")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteDba:
    meet: np.ndarray
    join: np.ndarray
    neg: np.ndarray
    opp: np.ndarray
    top: int
    bot: int
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        n = len(self.neg) if np.ndim(self.neg) == 1 else -1
        if n <= 0:
            raise DbaFormatError("neg table must be a non-empty 1-d table")
        object.__setattr__(self, "meet", _freeze(self.meet, (n, n), n, "meet"))
        object.__setattr__(self, "join", _freeze(self.join, (n, n), n, "join"))
        object.__setattr__(self, "neg", _freeze(self.neg, (n,), n, "neg"))
        object.__setattr__(self, "opp", _freeze(self.opp, (n,), n, "opp"))
        for name in ("top", "bot"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= v < n:
                raise DbaFormatError(f"{name} must be an index in [0, {n})")
            object.__setattr__(self, name, int(v))
        labels = tuple(str(s) for s in self.labels) or tuple(str(i) for i in range(n))
        if len(labels) != n:
            raise DbaFormatError(f"{len(labels)} labels for {n} elements")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.neg)

    def same_tables(self, other: "FiniteDba") -> bool:
        return (self.n == other.n and self.top == other.top and self.bot == other.bot
                and np.array_equal(self.meet, other.meet) and np.array_equal(self.join, other.join)
                and np.array_equal(self.neg, other.neg) and np.array_equal(self.opp, other.opp))

    # derived tables

    @cached_property
    def meet_square(self) -> np.ndarray:
        """x ⊓ x for every x."""
        return np.diagonal(self.meet).copy()

    @cached_property
    def join_square(self) -> np.ndarray:
        return np.diagonal(self.join).copy()

    @cached_property
    def vee(self) -> np.ndarray:
        """x ∨ y = ¬(¬x ⊓ ¬y)."""
        nx = self.neg
        return self.neg[self.meet[nx[:, None], nx[None, :]]]

    @cached_property
    def wedge(self) -> np.ndarray:
        """x ∧ y = ⌐(⌐x ⊔ ⌐y)."""
        ox = self.opp
        return self.opp[self.join[ox[:, None], ox[None, :]]]

    @cached_property
    def leq(self) -> np.ndarray:
        """Quasi-order matrix: entry (x, y) is x ⊑ y."""
        return (self.meet == self.meet_square[:, None]) & (self.join == self.join_square[None, :])

    @cached_property
    def meet_idempotent(self) -> np.ndarray:
        return self.meet_square == np.arange(self.n)

    @cached_property
    def join_idempotent(self) -> np.ndarray:
        return self.join_square == np.arange(self.n)

    def is_leq(self, x: int, y: int) -> bool:
        return bool(self.meet[x, y] == self.meet_square[x] and self.join[x, y] == self.join_square[y])

    def restrict(self, keep: Sequence[int]) -> "FiniteDba":
        """Subalgebra on ``keep`` (in the given order); element k is ``keep[k]``."""
        keep = np.asarray(keep, dtype=np.int64)
        local = np.full(self.n, -1, dtype=np.int64)
        local[keep] = np.arange(len(keep))

        def relabel(table, what):
            out = local[table]
            if (out < 0).any():
                raise ClosureError(f"subset not closed under {what}")
            return out

        ix = np.ix_(keep, keep)
        return self._rebuild(
            keep,
            meet=relabel(self.meet[ix], "meet"),
            join=relabel(self.join[ix], "join"),
            neg=relabel(self.neg[keep], "neg"),
            opp=relabel(self.opp[keep], "opp"),
            top=int(relabel(np.array([self.top]), "top")[0]),
            bot=int(relabel(np.array([self.bot]), "bot")[0]),
            labels=tuple(self.labels[i] for i in keep),
        )

    def _rebuild(self, keep, **tables) -> "FiniteDba":
        return FiniteDba(**tables)


# axioms and derived identities, vectorized


def _leq_arr(d: FiniteDba, a, b):
    return (d.meet[a, b] == d.meet_square[a]) & (d.join[a, b] == d.join_square[b])


def _unary_axioms(d: FiniteDba):
    M, J, N, O, T, B = d.meet, d.join, d.neg, d.opp, d.top, d.bot
    ar = np.arange(d.n)
    yield "4a", N[d.meet_square] == N
    yield "4b", O[d.join_square] == O
    yield "9a", M[ar, N] == B
    yield "9b", J[ar, O] == T


def _nullary_axioms(d: FiniteDba):
    M, J, N, O, T, B = d.meet, d.join, d.neg, d.opp, d.top, d.bot
    yield "10a", N[B] == M[T, T]
    yield "10b", O[T] == J[B, B]
    yield "11a", N[T] == B
    yield "11b", O[B] == T


def _binary_axioms(d: FiniteDba):
    M, J, N, O = d.meet, d.join, d.neg, d.opp
    ar = np.arange(d.n)
    mx, jx = d.meet_square, d.join_square
    yield "1a", M[mx, :] == M
    yield "1b", J[jx, :] == J
    yield "2a", M == M.T
    yield "2b", J == J.T
    yield "5a", M[ar[:, None], J] == mx[:, None]
    yield "5b", J[ar[:, None], M] == jx[:, None]
    yield "7a", M[ar[:, None], d.vee] == mx[:, None]
    yield "7b", J[ar[:, None], d.wedge] == jx[:, None]
    yield "8a", N[N[M]] == M
    yield "8b", O[O[J]] == J
    yield "12", np.broadcast_to(J[mx, mx] == M[jx, jx], (d.n,))


AXIOMS = ("1a", "1b", "2a", "2b", "3a", "3b", "4a", "4b", "5a", "5b", "6a", "6b",
          "7a", "7b", "8a", "8b", "9a", "9b", "10a", "10b", "11a", "11b", "12")


def _compact(table: np.ndarray) -> np.ndarray:
    return table.astype(np.int16) if table.shape[0] < 2 ** 15 else table


def _distinct_rows(table: np.ndarray) -> np.ndarray:
    """One representative index per distinct row of ``table``."""
    _, first = np.unique(table, axis=0, return_index=True)
    return np.sort(first)


def _ternary_axioms(d: FiniteDba, tables=None):
    """Associativity and distributivity, swept over x with (y, z) vectorized.

    At fixed x each law reads x only through its row of the relevant table,
    so one x per distinct row covers every triple.
    """
    M, J, V, W = tables or (d.meet, d.join, d.vee, d.wedge)
    take = np.take
    for x in _distinct_rows(M):
        mrow = M[x]
        yield "3a", x, take(mrow, M) == take(M, mrow, axis=0)
        yield "6a", x, take(mrow, V) == take(take(V, mrow, axis=0), mrow, axis=1)
    for x in _distinct_rows(J):
        jrow = J[x]
        yield "3b", x, take(jrow, J) == take(J, jrow, axis=0)
        yield "6b", x, take(jrow, W) == take(take(W, jrow, axis=0), jrow, axis=1)


def _derived_identities(d: FiniteDba):
    """Two-variable consequences of the axioms, as boolean matrices over (x, y)."""
    M, J, N, O, T, B = d.meet, d.join, d.neg, d.opp, d.top, d.bot
    n = d.n
    x = np.arange(n)[:, None]
    y = np.arange(n)[None, :]
    mx, jx = d.meet_square, d.join_square
    xy_meet, xy_join = M[x, y], J[x, y]
    yield "cor1-i", _leq_arr(d, M[xy_join, J[x, O[y]]], jx[x])
    yield "cor1-ii", _leq_arr(d, mx[x], J[xy_meet, M[x, N[y]]])
    yield "eq-i", M[x, N[xy_join]] == B
    yield "eq-ii", N[xy_join] == M[N[xy_join], N[x]]
    yield "eq-iii", xy_meet == M[x, N[M[x, N[y]]]]
    yield "eq-iv", J[x, M[y, N[x]]] == J[x, mx[y]]
    yield "eq-v", J[xy_meet, M[x, N[y]]] == np.broadcast_to(J[mx, mx][:, None], (n, n))
    yield "eq-vi", J[x, O[xy_meet]] == T
    yield "eq-vii", O[xy_meet] == J[O[xy_meet], O[x]]
    yield "eq-viii", xy_join == J[x, O[J[x, O[y]]]]
    yield "eq-ix", M[x, J[y, O[x]]] == M[x, jx[y]]
    yield "eq-x", M[xy_join, J[x, O[y]]] == np.broadcast_to(M[jx, jx][:, None], (n, n))


DERIVED = ("cor1-i", "cor1-ii", "eq-i", "eq-ii", "eq-iii", "eq-iv", "eq-v", "eq-vi",
           "eq-vii", "eq-viii", "eq-ix", "eq-x")


def _witnesses(ok: np.ndarray, prefix: tuple = (), limit: int = WITNESS_CAP) -> list[tuple]:
    bad = np.argwhere(~np.asarray(ok))
    return [prefix + tuple(int(v) for v in row) for row in bad[:limit]]


@dataclass
class ValidationReport:
    """Violated laws mapped to at most ``WITNESS_CAP`` witness tuples each."""
    violations: dict[str, list[tuple]] = field(default_factory=dict)
    derived_violations: dict[str, list[tuple]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def derived_ok(self) -> bool:
        return not self.derived_violations

    def first_counterexample(self):
        for name in AXIOMS:
            if name in self.violations:
                return {"law": name, "witness": list(self.violations[name][0])}
        for name, wit in self.derived_violations.items():
            return {"law": name, "witness": list(wit[0])}
        return None

    def to_json(self) -> dict:
        return {
            "violations": {k: [list(w) for w in v] for k, v in self.violations.items()},
            "derived_violations": {k: [list(w) for w in v] for k, v in self.derived_violations.items()},
        }


def validate_dba(d: FiniteDba, derived: bool = True) -> ValidationReport:
    """Exhaustive check of all 23 axioms (and, optionally, the derived identities)."""
    report = ValidationReport()

    def note(target, name, wit):
        if wit:
            have = target.setdefault(name, [])
            have.extend(wit[:WITNESS_CAP - len(have)])

    for name, ok in _nullary_axioms(d):
        if not ok:
            note(report.violations, name, [()])
    for name, ok in _unary_axioms(d):
        note(report.violations, name, _witnesses(ok))
    for name, ok in _binary_axioms(d):
        note(report.violations, name, _witnesses(ok))
    tables = tuple(_compact(t) for t in (d.meet, d.join, d.vee, d.wedge))
    for name, x, ok in _ternary_axioms(d, tables):
        if len(report.violations.get(name, ())) < WITNESS_CAP and not ok.all():
            note(report.violations, name, _witnesses(ok, (int(x),)))
    report.violations = {k: report.violations[k] for k in AXIOMS if k in report.violations}
    if derived:
        for name, ok in _derived_identities(d):
            note(report.derived_violations, name, _witnesses(ok))
    return report


def check_properties(d: FiniteDba, ternary: bool = True) -> dict[str, list[tuple]]:
    """Further consequences of the axioms; returns only the failing ones.

    Covers bounds and order facts, negation facts, the meet/join chains and
    the idempotent-part description of the quasi-order.  ``ternary`` adds the
    three-variable monotonicity law (cubic cost).
    """
    M, J, N, O, T, B = d.meet, d.join, d.neg, d.opp, d.top, d.bot
    V, W, L = d.vee, d.wedge, d.leq
    n = d.n
    ar = np.arange(n)
    x = ar[:, None]
    y = ar[None, :]
    mx, jx = d.meet_square, d.join_square
    checks = {
        "bot-absorbs": (M[ar, B] == B) & (J[ar, B] == jx),
        "top-absorbs": (J[ar, T] == T) & (M[ar, T] == mx),
        "bot-below": L[B, :],
        "top-above": L[:, T],
        "equal-implies-both-ways": np.diagonal(L),
        "mutual-order-iff-same-parts": (L & L.T) == ((mx[x] == mx[y]) & (jx[x] == jx[y])),
        "meet-below-args": _leq_arr(d, M[x, y], x) & _leq_arr(d, M[x, y], y),
        "join-above-args": _leq_arr(d, y, J[x, y]) & _leq_arr(d, x, J[x, y]),
        "neg-meet-idempotent": (N == mx[N]) & d.meet_idempotent[N],
        "opp-join-idempotent": (O == jx[O]) & d.join_idempotent[O],
        "order-reversal": L == (L[N[y], N[x]] & L[O[y], O[x]]),
        "double-neg": N[N] == mx,
        "double-opp": O[O] == jx,
        "parts-in-idempotents": d.meet_idempotent[mx] & d.join_idempotent[jx],
        "vee-wedge-in-idempotents": d.meet_idempotent[V] & d.join_idempotent[W],
        "de-morgan-neg": (N[V] == M[N[x], N[y]]) & (N[M] == V[N[x], N[y]]),
        "de-morgan-opp": (O[W] == J[O[x], O[y]]) & (O[J] == W[O[x], O[y]]),
        "opp-galois": L[x, O[y]] == L[y, O[x]],
        "neg-galois": L[N[x], y] == L[N[y], x],
        "triple-neg": N[N[N]] == N,
        "meet-vee-join": _leq_arr(d, M, V) & _leq_arr(d, V, J),
        "meet-wedge-join": _leq_arr(d, M, W) & _leq_arr(d, W, J),
        "order-by-parts": L == (L[mx[x], mx[y]] & L[jx[x], jx[y]]),
    }
    out = {}
    for name, ok in checks.items():
        ok = np.broadcast_to(ok, ok.shape)
        if not ok.all():
            out[name] = _witnesses(ok)
    if ternary:
        bad = []
        for a in range(n):
            ma, ja = M[:, a], J[:, a]
            # x ⊑ y implies x⊓a ⊑ y⊓a and x⊔a ⊑ y⊔a
            ok = ~L | (_leq_arr(d, ma[:, None], ma[None, :]) & _leq_arr(d, ja[:, None], ja[None, :]))
            if not ok.all():
                bad.extend(w + (a,) for w in _witnesses(ok, limit=WITNESS_CAP - len(bad)))
                if len(bad) >= WITNESS_CAP:
                    break
        if bad:
            out["monotone"] = bad
    return out


# finite meets and joins over non-empty subsets


def _fold(table: np.ndarray, elements: Iterable[int]) -> int:
    elements = list(elements)
    if not elements:
        raise ValueError("finite meets and joins are defined for non-empty subsets only")
    acc = elements[0]
    for e in elements[1:]:
        acc = int(table[acc, e])
    return int(acc)


def big_meet(d: FiniteDba, elements) -> int:
    return _fold(d.meet, elements)


def big_join(d: FiniteDba, elements) -> int:
    return _fold(d.join, elements)


def big_vee(d: FiniteDba, elements) -> int:
    return _fold(d.vee, elements)


def big_wedge(d: FiniteDba, elements) -> int:
    return _fold(d.wedge, elements)


# classification


class DbaClass(NamedTuple):
    contextual: bool
    fully_contextual: bool
    pure: bool


def quasi_order(d: FiniteDba) -> np.ndarray:
    return d.leq


def classify_dba(d: FiniteDba) -> DbaClass:
    L = d.leq
    contextual = not (L & L.T & ~np.eye(d.n, dtype=bool)).any()
    pure = bool((d.meet_idempotent | d.join_idempotent).all())
    if pure and not contextual:
        raise InvalidDbaError("pure tables with a non-antisymmetric quasi-order cannot form a dBa")
    fully = contextual and _unique_gluing(d)
    return DbaClass(contextual, fully, pure)


def _unique_gluing(d: FiniteDba) -> bool:
    mx, jx = d.meet_square, d.join_square
    counts: dict[tuple[int, int], int] = {}
    for z in range(d.n):
        key = (int(mx[z]), int(jx[z]))
        counts[key] = counts.get(key, 0) + 1
    join_idem = np.flatnonzero(d.join_idempotent)
    by_meet_part: dict[int, list[int]] = {}
    for x in join_idem:
        by_meet_part.setdefault(int(mx[x]), []).append(int(x))
    for y in np.flatnonzero(d.meet_idempotent):
        for x in by_meet_part.get(int(jx[y]), ()):
            if counts.get((int(y), x), 0) != 1:
                return False
    return True


def gluing_failure(d: FiniteDba):
    """First (y, x) pair breaking the unique-gluing condition, or None."""
    mx, jx = d.meet_square, d.join_square
    for y in np.flatnonzero(d.meet_idempotent):
        for x in np.flatnonzero(d.join_idempotent & (mx == jx[y])):
            hits = np.flatnonzero((mx == y) & (jx == x))
            if len(hits) != 1:
                return int(y), int(x), [int(h) for h in hits]
    return None


def pure_indices(d: FiniteDba) -> np.ndarray:
    return np.flatnonzero(d.meet_idempotent | d.join_idempotent)


def pure_part(d: FiniteDba) -> FiniteDba:
    return d.restrict(pure_indices(d))


# Boolean algebras


@dataclass(frozen=True, eq=False)
class BooleanAlgebra:
    meet: np.ndarray
    join: np.ndarray
    neg: np.ndarray
    top: int
    bot: int
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        n = len(self.neg)
        if n == 0:
            raise DbaFormatError("empty carrier")
        object.__setattr__(self, "meet", _freeze(self.meet, (n, n), n, "meet"))
        object.__setattr__(self, "join", _freeze(self.join, (n, n), n, "join"))
        object.__setattr__(self, "neg", _freeze(self.neg, (n,), n, "neg"))
        object.__setattr__(self, "top", int(self.top))
        object.__setattr__(self, "bot", int(self.bot))
        labels = tuple(self.labels) or tuple(str(i) for i in range(n))
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.neg)

    def same_tables(self, other: "BooleanAlgebra") -> bool:
        return (self.n == other.n and self.top == other.top and self.bot == other.bot
                and np.array_equal(self.meet, other.meet) and np.array_equal(self.join, other.join)
                and np.array_equal(self.neg, other.neg))


def boolean_power(k: int, names: Sequence[str] | None = None) -> BooleanAlgebra:
    """Power set of a ``k``-element set; element ``i`` is the subset with bitmask ``i``."""
    names = list(names) if names is not None else [f"a{i}" for i in range(k)]
    size = 1 << k
    ar = np.arange(size)
    labels = ["{" + ",".join(names[j] for j in range(k) if i >> j & 1) + "}" for i in range(size)]
    return BooleanAlgebra(ar[:, None] & ar[None, :], ar[:, None] | ar[None, :],
                          (size - 1) ^ ar, size - 1, 0, tuple(labels))


def boolean_atoms(ba: BooleanAlgebra) -> list[int]:
    below = ba.meet == np.arange(ba.n)[:, None]  # (x, y): x ≤ y
    atoms = []
    for a in range(ba.n):
        if a == ba.bot:
            continue
        under = np.flatnonzero(below[:, a])
        if set(int(u) for u in under) == {ba.bot, a}:
            atoms.append(a)
    return atoms


def _boolean_laws(ba: BooleanAlgebra):
    M, J, N, T, B = ba.meet, ba.join, ba.neg, ba.top, ba.bot
    ar = np.arange(ba.n)
    x, y = ar[:, None], ar[None, :]
    yield "meet-commutative", M == M.T
    yield "join-commutative", J == J.T
    yield "absorption", (M[x, J] == x) & (J[x, M] == x)
    yield "complement", (M[ar, N] == B) & (J[ar, N] == T)
    yield "bounds", (M[ar, T] == ar) & (J[ar, B] == ar)
    for z in range(ba.n):
        ok = (M[M[x, y], z] == M[x, M[y, z]]) & (J[J[x, y], z] == J[x, J[y, z]]) \
            & (M[x, J[y, z]] == J[M[x, y], M[x, z]]) & (J[x, M[y, z]] == M[J[x, y], J[x, z]])
        if not ok.all():
            yield "associative-distributive", ok
            return


def _boolean_by_atoms(ba: BooleanAlgebra):
    """Exact check that ``ba`` is isomorphic to the power set of its atoms."""
    atoms = boolean_atoms(ba)
    k = len(atoms)
    if ba.n != 1 << k or k > 62:
        yield "size-is-power-of-atoms", np.zeros(1, dtype=bool)
        return
    below = ba.meet == np.arange(ba.n)[:, None]
    code = np.zeros(ba.n, dtype=np.int64)
    for j, a in enumerate(atoms):
        code |= below[a, :].astype(np.int64) << j
    yield "atom-code-bijective", np.array([len(np.unique(code)) == ba.n])
    yield "meet-is-intersection", code[ba.meet] == (code[:, None] & code[None, :])
    yield "join-is-union", code[ba.join] == (code[:, None] | code[None, :])
    yield "neg-is-complement", code[ba.neg] == ((1 << k) - 1) ^ code
    yield "bounds", np.array([code[ba.bot] == 0, code[ba.top] == (1 << k) - 1])


EXHAUSTIVE_BOOLEAN_LIMIT = 64


def validate_boolean(ba: BooleanAlgebra, exhaustive: bool | None = None) -> dict[str, list[tuple]]:
    """Failing Boolean-algebra laws with witnesses; empty means Boolean.

    Small carriers are swept law by law; larger ones are checked through the
    map sending each element to the set of atoms below it, which is exact.
    """
    if exhaustive is None:
        exhaustive = ba.n <= EXHAUSTIVE_BOOLEAN_LIMIT
    laws = _boolean_laws(ba) if exhaustive else _boolean_by_atoms(ba)
    out = {}
    for name, ok in laws:
        if not np.all(ok):
            out[name] = _witnesses(ok)
    return out


class NotBooleanError(ValueError):
    pass


def from_boolean(ba: BooleanAlgebra) -> FiniteDba:
    failures = validate_boolean(ba)
    if failures:
        raise NotBooleanError(f"not a Boolean algebra: {sorted(failures)}")
    return FiniteDba(ba.meet, ba.join, ba.neg, ba.neg, ba.top, ba.bot, ba.labels)


def to_boolean(d: FiniteDba) -> BooleanAlgebra | None:
    if not np.array_equal(d.neg, d.opp) or not np.array_equal(d.neg[d.neg], np.arange(d.n)):
        return None
    ba = BooleanAlgebra(d.meet, d.join, d.neg, d.top, d.bot, d.labels)
    failures = validate_boolean(ba)
    if failures:
        raise InvalidDbaError(f"negations agree and are involutive but laws fail: {sorted(failures)}")
    return ba


@dataclass(frozen=True)
class BooleanReport:
    algebra: BooleanAlgebra
    members: tuple[int, ...]     # carrier indices of the reduct, in order
    extremal: tuple[int, ...]    # atoms (meet side) or coatoms (join side), carrier indices
    failures: dict


def boolean_reducts(d: FiniteDba) -> tuple[BooleanReport, BooleanReport]:
    """The ⊓-idempotent and ⊔-idempotent Boolean algebras.

    The first report lists atoms of the ⊓ side; the second lists coatoms of
    the ⊔ side.  Both carry the order inherited from the quasi-order.
    """
    meet_side = np.flatnonzero(d.meet_idempotent)
    join_side = np.flatnonzero(d.join_idempotent)
    lo = _local_ba(d, meet_side, d.meet, d.vee, d.neg, top=int(d.neg[d.bot]), bot=d.bot)
    hi = _local_ba(d, join_side, d.wedge, d.join, d.opp, top=d.top, bot=int(d.opp[d.top]))
    out = []
    for ba, members, which in ((lo, meet_side, "atoms"), (hi, join_side, "coatoms")):
        failures = validate_boolean(ba)
        if failures:
            raise InvalidDbaError(f"idempotent reduct is not Boolean: {sorted(failures)}")
        atoms = boolean_atoms(ba)
        if which == "coatoms":
            picked = sorted(int(ba.neg[a]) for a in atoms)
        else:
            picked = atoms
        out.append(BooleanReport(ba, tuple(int(m) for m in members),
                                 tuple(int(members[a]) for a in picked), failures))
    return out[0], out[1]


def _local_ba(d, members, meet, join, neg, top, bot) -> BooleanAlgebra:
    local = np.full(d.n, -1, dtype=np.int64)
    local[members] = np.arange(len(members))
    ix = np.ix_(members, members)
    tables = [local[meet[ix]], local[join[ix]], local[neg[members]]]
    if any((t < 0).any() for t in tables) or local[top] < 0 or local[bot] < 0:
        raise InvalidDbaError("idempotent reduct is not closed under its operations")
    return BooleanAlgebra(*tables, int(local[top]), int(local[bot]),
                          tuple(d.labels[i] for i in members))


def product(d1: FiniteDba, d2: FiniteDba) -> FiniteDba:
    """Componentwise product; element ``i * d2.n + j`` is the pair (i, j)."""
    n2 = d2.n

    def pair(a, b):
        return a * n2 + b

    i = np.repeat(np.arange(d1.n), n2)
    j = np.tile(np.arange(n2), d1.n)
    meet = pair(d1.meet[i[:, None], i[None, :]], d2.meet[j[:, None], j[None, :]])
    join = pair(d1.join[i[:, None], i[None, :]], d2.join[j[:, None], j[None, :]])
    labels = [f"({d1.labels[a]},{d2.labels[b]})" for a, b in zip(i, j)]
    return FiniteDba(meet, join, pair(d1.neg[i], d2.neg[j]), pair(d1.opp[i], d2.opp[j]),
                     pair(d1.top, d2.top), pair(d1.bot, d2.bot), tuple(labels))


def duplicate_element(d: FiniteDba, x: int) -> FiniteDba:
    """Add a copy of ``x`` that every operation treats exactly like ``x``.

    No operation ever returns the copy, and every axiom equates two
    operation results, so the axioms survive; the copy and ``x`` are
    ⊑-equivalent, which breaks antisymmetry.
    """
    n = d.n
    src = np.append(np.arange(n), x)
    meet = d.meet[src[:, None], src[None, :]]
    join = d.join[src[:, None], src[None, :]]
    labels = tuple(d.labels) + (f"{d.labels[x]}'",)
    return FiniteDba(meet, join, d.neg[src], d.opp[src], d.top, d.bot, labels)


# homomorphisms


@dataclass(frozen=True, eq=False)
class DbaHom:
    source: FiniteDba
    target: FiniteDba
    map: tuple[int, ...]
    homomorphism: bool
    quasi_injective: bool
    injective: bool
    surjective: bool
    failure: tuple | None = None  # first failing equation and its witness

    @property
    def isomorphism(self) -> bool:
        return self.homomorphism and self.injective and self.surjective

    def __call__(self, x: int) -> int:
        return self.map[x]


def check_hom(src: FiniteDba, dst: FiniteDba, mapping: Sequence[int]) -> DbaHom:
    h = np.asarray(list(mapping), dtype=np.int64)
    if h.shape != (src.n,):
        raise ValueError(f"map has {h.size} entries, expected {src.n}")
    if h.size and (h.min() < 0 or h.max() >= dst.n):
        raise ValueError("map value out of range of the target carrier")
    equations = (
        ("meet", h[src.meet] == dst.meet[h[:, None], h[None, :]]),
        ("join", h[src.join] == dst.join[h[:, None], h[None, :]]),
        ("neg", h[src.neg] == dst.neg[h]),
        ("opp", h[src.opp] == dst.opp[h]),
        ("top", np.array([h[src.top] == dst.top])),
        ("bot", np.array([h[src.bot] == dst.bot])),
    )
    failure = None
    for name, ok in equations:
        if not ok.all():
            failure = (name,) + _witnesses(ok, limit=1)[0]
            break
    quasi = bool(np.array_equal(src.leq, dst.leq[h[:, None], h[None, :]]))
    injective = len(np.unique(h)) == src.n
    surjective = len(np.unique(h)) == dst.n
    return DbaHom(src, dst, tuple(int(v) for v in h), failure is None, quasi, injective, surjective,
                  failure)


def compose(g: DbaHom, f: DbaHom) -> DbaHom:
    """g ∘ f."""
    if f.target is not g.source:
        raise ValueError("maps are not composable")
    return check_hom(f.source, g.target, [g.map[v] for v in f.map])


def identity_hom(d: FiniteDba) -> DbaHom:
    return check_hom(d, d, range(d.n))


def extend_pure_iso(D: FiniteDba, M: FiniteDba, h: Mapping[int, int]) -> DbaHom:
    """Extend an isomorphism between pure parts to the whole algebras.

    ``h`` maps carrier indices of ``D`` lying in its pure part to carrier
    indices of ``M``.  The image of x is the unique element whose ⊓- and
    ⊔-parts are the images of x's parts.
    """
    if not classify_dba(D).fully_contextual or not classify_dba(M).fully_contextual:
        raise InvalidDbaError("both algebras must be fully contextual")
    pd, pm = pure_indices(D), pure_indices(M)
    h = {int(k): int(v) for k, v in h.items()}
    if sorted(h) != [int(i) for i in pd]:
        raise ValueError("map must be defined exactly on the pure part of the source")
    if sorted(h.values()) != [int(i) for i in pm]:
        raise ValueError("map must be a bijection onto the pure part of the target")
    m_local = {int(v): k for k, v in enumerate(pm)}
    restricted = check_hom(D.restrict(pd), M.restrict(pm), [m_local[h[int(x)]] for x in pd])
    if not restricted.isomorphism:
        raise ValueError(f"map is not an isomorphism of pure parts: {restricted.failure}")
    by_parts: dict[tuple[int, int], list[int]] = {}
    for c in range(M.n):
        by_parts.setdefault((int(M.meet_square[c]), int(M.join_square[c])), []).append(c)
    image = []
    for x in range(D.n):
        key = (h[int(D.meet_square[x])], h[int(D.join_square[x])])
        hits = by_parts.get(key, [])
        if len(hits) != 1:
            raise InvalidDbaError(f"element {x} has {len(hits)} candidate images")
        image.append(hits[0])
    f = check_hom(D, M, image)
    if not f.isomorphism:
        raise InvalidDbaError(f"extension is not an isomorphism: {f.failure}")
    if any(f.map[k] != v for k, v in h.items()):
        raise InvalidDbaError("extension does not restrict to the given map")
    return f


# JSON


def dba_to_json(d: FiniteDba) -> dict:
    return {
        "n": d.n,
        "meet": d.meet.tolist(),
        "join": d.join.tolist(),
        "neg": d.neg.tolist(),
        "opp": d.opp.tolist(),
        "top": d.top,
        "bot": d.bot,
        "labels": list(d.labels),
    }


def dba_from_json(data) -> FiniteDba:
    if not isinstance(data, dict):
        raise DbaFormatError("dBa JSON must be an object")
    try:
        n = data["n"]
        d = FiniteDba(data["meet"], data["join"], data["neg"], data["opp"], data["top"], data["bot"],
                      tuple(data.get("labels") or ()))
    except KeyError as exc:
        raise DbaFormatError(f"dBa JSON missing key {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DbaFormatError):
            raise
        raise DbaFormatError(str(exc)) from None
    if d.n != n:
        raise DbaFormatError(f"declared n={n} but tables have {d.n} elements")
    return d


def dumps_dba(d: FiniteDba) -> str:
    return json.dumps(dba_to_json(d), separators=(",", ":")) + "\n"
