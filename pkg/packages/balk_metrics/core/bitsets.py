"""
Bitmask helpers for subsets of a finite universe.

A subset of an n-element universe is an int whose bit i is set when element i
belongs to it. Dense tables over subsets are numpy arrays of length 2**n
indexed by mask. The sum-over-subsets transforms here replace explicit
enumeration of pairs B <= A with O(n * 2**n) vectorized sweeps.
"""

from functools import lru_cache
from typing import Iterable, Iterator, List, Tuple

import numpy as np

MAX_UNIVERSE = 24


@lru_cache(maxsize=8)
def popcounts(n: int) -> np.ndarray:
    """
    Cardinality of every mask below 2**n.

    Args:
        n: Universe size

    Returns:
        Read-only uint8 array of length 2**n
    """
    counts = np.zeros(1 << n, dtype=np.uint8)
    for b in range(n):
        low = 1 << b
        counts[low:2 * low] = counts[:low] + 1
    counts.setflags(write=False)
    return counts


def bit_count(mask: int) -> int:
    return bin(mask).count("1")


def mask_members(mask: int) -> List[int]:
    """Indices of the set bits in ascending order."""
    members = []
    i = 0
    while mask:
        if mask & 1:
            members.append(i)
        mask >>= 1
        i += 1
    return members


def members_to_mask(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << int(i)
    return mask


def iter_submasks(mask: int) -> Iterator[int]:
    """Nonempty submasks of mask, largest first."""
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def submask_array(mask: int) -> np.ndarray:
    """All submasks of mask (including 0) as an int64 array."""
    subs = np.zeros(1, dtype=np.int64)
    for i in mask_members(mask):
        subs = np.concatenate([subs, subs | (1 << i)])
    return subs


def one_smaller(mask: int) -> Iterator[int]:
    """Masks obtained by dropping one element, keeping the result nonempty."""
    for i in mask_members(mask):
        smaller = mask & ~(1 << i)
        if smaller:
            yield smaller


def subset_max(table: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    For every mask A, the max of table over all submasks of A (A included).

    Entries that must not take part should be -inf; mask 0 is treated as -inf.
    Ties keep the smaller submask.

    Returns:
        (values, argmax masks), both of length 2**n
    """
    values = np.array(table, dtype=float)
    values[0] = -np.inf
    args = np.arange(1 << n, dtype=np.int64)
    for b in range(n):
        v = values.reshape(-1, 2, 1 << b)
        a = args.reshape(-1, 2, 1 << b)
        take = v[:, 0, :] >= v[:, 1, :]
        v[:, 1, :] = np.where(take, v[:, 0, :], v[:, 1, :])
        a[:, 1, :] = np.where(take, a[:, 0, :], a[:, 1, :])
    return values, args


def proper_subset_max(table: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    For every mask A, the max of table over nonempty proper submasks of A.

    Singletons (and mask 0) get -inf.

    Returns:
        (values, argmax masks), both of length 2**n
    """
    below, below_args = subset_max(table, n)
    values = np.full(1 << n, -np.inf)
    args = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        bv = below.reshape(-1, 2, 1 << b)
        ba = below_args.reshape(-1, 2, 1 << b)
        v = values.reshape(-1, 2, 1 << b)
        a = args.reshape(-1, 2, 1 << b)
        better = bv[:, 0, :] > v[:, 1, :]
        v[:, 1, :] = np.where(better, bv[:, 0, :], v[:, 1, :])
        a[:, 1, :] = np.where(better, ba[:, 0, :], a[:, 1, :])
    return values, args
