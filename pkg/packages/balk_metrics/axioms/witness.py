"""
Witness shrinking.

Greedy one-element removal in the style of delta debugging: keep dropping a
single element from one of the violating sets while the violation persists.
The result is locally minimal, not globally minimal.
"""

from typing import Callable, Iterator, Tuple

from ..core.bitsets import one_smaller

Parts = Tuple[int, ...]


def _neighbours(parts: Parts) -> Iterator[Parts]:
    for position, mask in enumerate(parts):
        for smaller in one_smaller(mask):
            yield parts[:position] + (smaller,) + parts[position + 1:]


def shrink_witness(parts: Parts, violates: Callable[[Parts], bool], max_rounds: int) -> Parts:
    """
    Shrink a violating tuple of masks.

    Args:
        parts: Violating masks, e.g. (A, B, C)
        violates: Predicate that re-evaluates the violated relation
        max_rounds: Upper bound on accepted removals

    Returns:
        A tuple that still violates and has no violating one-smaller neighbour,
        unless the round bound was hit first
    """
    current = tuple(int(p) for p in parts)
    for _ in range(max_rounds):
        for candidate in _neighbours(current):
            if violates(candidate):
                current = candidate
                break
        else:
            break
    return current
