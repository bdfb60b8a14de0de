"""Subsets of a finite index range packed into Python ints.

Bit ``i`` set means index ``i`` belongs to the set.  Everything downstream
(extents, intents, open sets, filters) uses this encoding.
"""

from __future__ import annotations

from typing import Iterable, Iterator


def full(n: int) -> int:
    return (1 << n) - 1


def from_indices(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def indices(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def count(mask: int) -> int:
    return mask.bit_count()


def contains(mask: int, i: int) -> bool:
    return bool(mask >> i & 1)


def subset(a: int, b: int) -> bool:
    """True when ``a`` is contained in ``b``."""
    return a & ~b == 0


def iter_submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def check_width(mask: int, n: int, side: str = "set") -> int:
    if mask < 0 or mask >> n:
        raise ValueError(f"{side} {mask:#x} does not fit in {n} positions")
    return mask
