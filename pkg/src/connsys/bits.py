"""Bitmask helpers. A subset of an n-element universe is an int below 2**n."""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np


def popcount(x: int) -> int:
    return int(x).bit_count()


def indices(x: int) -> list[int]:
    out = []
    i = 0
    while x:
        if x & 1:
            out.append(i)
        x >>= 1
        i += 1
    return out


def iter_bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def from_indices(idx: Iterable[int]) -> int:
    m = 0
    for i in idx:
        m |= 1 << i
    return m


def lowest_index(x: int) -> int:
    return (x & -x).bit_length() - 1


def is_subset(x: int, y: int) -> bool:
    return x & ~y == 0


def submasks(x: int) -> Iterator[int]:
    """All submasks of ``x`` in ascending order."""
    a = 0
    while True:
        yield a
        a = (a - x) & x
        if a == 0:
            return


def submask_array(x: int) -> np.ndarray:
    """All submasks of ``x`` as an ascending int64 array."""
    idx = indices(x)
    arr = np.zeros(1 << len(idx), dtype=np.int64)
    for j, i in enumerate(idx):
        block = 1 << j
        arr[block: 2 * block] = arr[:block] | (1 << i)
    return arr


def popcount_array(arr: np.ndarray) -> np.ndarray:
    a = np.asarray(arr).astype(np.uint64)
    out = np.zeros(a.shape, dtype=np.int64)
    while a.any():
        out += (a & np.uint64(1)).astype(np.int64)
        a >>= np.uint64(1)
    return out


def permute_mask(x: int, perm: Sequence[int]) -> int:
    """Image of ``x`` under the index map ``i -> perm[i]``."""
    m = 0
    for i in iter_bits(x):
        m |= 1 << perm[i]
    return m


def to_hex(x: int) -> str:
    """Hex rendering; bit i is universe element i (little-endian in declaration order)."""
    return format(x, "x")


def from_hex(s: str) -> int:
    return int(s, 16)
