"""Set functions known only on subsets of bounded cardinality."""

from typing import Iterator, Mapping, Tuple

import numpy as np

from ..core.bitsets import popcounts
from ..core.tables import SetFunction
from ..core.universe import Universe, check_subset
from ..exceptions import InputError


class PartialSetFunction:
    """
    Table on {A : 1 <= |A| <= k_cap}.

    Stored densely; slots with |A| > k_cap (and the empty set) hold NaN.

    Args:
        universe: The universe X
        k_cap: Cardinality bound, at least 1
        values: {mask: value} for every mask with 1 <= |mask| <= k_cap and nothing else
    """

    __slots__ = ("universe", "k_cap", "table")

    def __init__(self, universe: Universe, k_cap: int, values: Mapping[int, float]):
        if k_cap < 1:
            raise InputError(f"k_cap must be at least 1, got {k_cap}")
        pc = popcounts(universe.n)
        table = np.full(universe.size, np.nan)
        for mask, value in values.items():
            check_subset(mask, universe)
            if pc[mask] > k_cap:
                raise InputError(f"value stored for subset of size {pc[mask]} above k_cap {k_cap}")
            if not np.isfinite(value):
                raise InputError(f"non-finite value at subset mask {mask:#x}")
            table[mask] = value
        inside = (pc >= 1) & (pc <= k_cap)
        missing = np.flatnonzero(inside & np.isnan(table))
        if missing.size:
            raise InputError(f"partial table is not total: subset mask {int(missing[0]):#x} missing")
        table.setflags(write=False)
        self.universe = universe
        self.k_cap = int(k_cap)
        self.table = table

    @property
    def n(self) -> int:
        return self.universe.n

    def items(self) -> Iterator[Tuple[int, float]]:
        for mask in np.flatnonzero(~np.isnan(self.table)):
            yield int(mask), float(self.table[mask])

    def __repr__(self) -> str:
        return f"PartialSetFunction(n={self.n}, k_cap={self.k_cap})"


def restrict_to_cardinality(tau: SetFunction, k: int) -> PartialSetFunction:
    """Restriction of tau to subsets with at most k elements."""
    pc = popcounts(tau.n)
    masks = np.flatnonzero((pc >= 1) & (pc <= k))
    return PartialSetFunction(tau.universe, k, {int(m): float(tau.table[m]) for m in masks})
