"""
Immutable tables over a finite universe.

SetFunction stores a dense array of length 2**n indexed by bitmask (slot 0 is
NaN and never read). FiniteMetric stores an n x n matrix and validates shape
only; the metric axioms are the business of axioms.check_metric. GMetricTable
stores a permutation-invariant n x n x n cube built from sorted-multiset keys.
"""

from itertools import combinations_with_replacement
from typing import Callable, Dict, Iterator, Mapping, Sequence, Tuple

import numpy as np

from ..exceptions import InputError
from .universe import Universe, check_subset


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class SetFunction:
    """
    Total real-valued function on the nonempty subsets of a universe.

    Args:
        universe: The universe X
        values: 2**n - 1 finite reals; values[mask - 1] is tau(mask)
    """

    __slots__ = ("universe", "table")

    def __init__(self, universe: Universe, values: Sequence[float]):
        values = np.asarray(values, dtype=float)
        expected = universe.size - 1
        if values.shape != (expected,):
            raise InputError(
                f"set function over {universe.n} points needs {expected} values, got {values.size}"
            )
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0]) + 1
            raise InputError(f"non-finite value at subset mask {bad:#x}")
        table = np.empty(universe.size)
        table[0] = np.nan
        table[1:] = values
        self.universe = universe
        self.table = _frozen(table)

    @classmethod
    def from_table(cls, universe: Universe, table: np.ndarray) -> "SetFunction":
        """Build from a dense length-2**n array; slot 0 is ignored."""
        table = np.asarray(table, dtype=float)
        if table.shape != (universe.size,):
            raise InputError(f"dense table must have length {universe.size}, got {table.size}")
        return cls(universe, table[1:])

    @classmethod
    def from_mapping(cls, universe: Universe, values: Mapping[int, float]) -> "SetFunction":
        """Build from {mask: value}; every nonempty mask must be present."""
        table = np.full(universe.size, np.nan)
        for mask, value in values.items():
            check_subset(mask, universe)
            table[mask] = value
        missing = np.flatnonzero(np.isnan(table[1:]))
        if missing.size:
            raise InputError(f"set function is not total: subset mask {int(missing[0]) + 1:#x} missing")
        return cls(universe, table[1:])

    @property
    def n(self) -> int:
        return self.universe.n

    @property
    def values(self) -> np.ndarray:
        """Flat view indexed by mask - 1."""
        return self.table[1:]

    def evaluate(self, mask: int) -> float:
        """tau(mask) for a nonempty subset."""
        check_subset(mask, self.universe)
        return float(self.table[mask])

    def items(self) -> Iterator[Tuple[int, float]]:
        for mask in range(1, self.universe.size):
            yield mask, float(self.table[mask])

    def __repr__(self) -> str:
        return f"SetFunction(n={self.n}, names={list(self.universe.names)})"


def tau_eval(tau: SetFunction, mask: int) -> float:
    """Pure lookup of tau on a nonempty subset."""
    return tau.evaluate(mask)


class FiniteMetric:
    """
    Distance table on a finite point set.

    Construction checks shape and finiteness; use axioms.check_metric for the
    metric axioms.
    """

    __slots__ = ("universe", "dist")

    def __init__(self, universe: Universe, dist):
        dist = np.array(dist, dtype=float)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise InputError(f"distance matrix must be square, got shape {dist.shape}")
        if dist.shape[0] != universe.n:
            raise InputError(f"distance matrix is {dist.shape[0]}x{dist.shape[0]} for {universe.n} points")
        if not np.all(np.isfinite(dist)):
            raise InputError("distance matrix has non-finite entries")
        self.universe = universe
        self.dist = _frozen(dist)

    @property
    def n(self) -> int:
        return self.universe.n

    def __repr__(self) -> str:
        return f"FiniteMetric(n={self.n})"


class GMetricTable:
    """
    Ternary function G on X^3 that is invariant under permutation.

    The table is keyed by sorted index triples with repetition, which makes
    permutation invariance hold by construction.
    """

    __slots__ = ("universe", "cube")

    def __init__(self, universe: Universe, values: Mapping[Tuple[int, int, int], float]):
        n = universe.n
        cube = np.full((n, n, n), np.nan)
        for key, value in values.items():
            if len(key) != 3:
                raise InputError(f"G key {key} must have three indices")
            i, j, k = sorted(int(x) for x in key)
            if i < 0 or k >= n:
                raise InputError(f"G key {key} outside universe of size {n}")
            if not np.isfinite(value):
                raise InputError(f"G value at {key} is not finite")
            for a, b, c in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
                cube[a, b, c] = value
        if np.isnan(cube).any():
            i, j, k = (int(x) for x in np.argwhere(np.isnan(cube))[0])
            raise InputError(f"G table is not total: multiset {sorted((i, j, k))} missing")
        self.universe = universe
        self.cube = _frozen(cube)

    @classmethod
    def from_function(cls, universe: Universe, fn: Callable[[int, int, int], float]) -> "GMetricTable":
        """Tabulate fn on every sorted multiset."""
        return cls(universe, {key: fn(*key) for key in multisets(universe.n)})

    @classmethod
    def from_cube(cls, universe: Universe, cube: np.ndarray) -> "GMetricTable":
        """Read the sorted-multiset entries of an n x n x n array."""
        cube = np.asarray(cube, dtype=float)
        if cube.shape != (universe.n,) * 3:
            raise InputError(f"G cube must have shape {(universe.n,) * 3}, got {cube.shape}")
        return cls(universe, {key: float(cube[key]) for key in multisets(universe.n)})

    @property
    def n(self) -> int:
        return self.universe.n

    def value(self, x: int, y: int, z: int) -> float:
        return float(self.cube[x, y, z])

    def values(self) -> Dict[Tuple[int, int, int], float]:
        return {key: float(self.cube[key]) for key in multisets(self.n)}

    def __repr__(self) -> str:
        return f"GMetricTable(n={self.n})"


def multisets(n: int) -> Iterator[Tuple[int, int, int]]:
    """Sorted index triples with repetition."""
    return combinations_with_replacement(range(n), 3)
