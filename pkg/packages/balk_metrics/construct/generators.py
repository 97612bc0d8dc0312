"""
Generators for test and exploration objects.

- stepped_cardinality_metric: tau depends only on |A| through a stepped
  t-sequence; k-increasing but not (k+1)-increasing
- random_metric: Euclidean distances of seeded points in the unit square
- max_pairwise_g / perturbed_symmetric_g: symmetric G-metric tables
- repaired_perturbation: compatible extended metric above the diameter
"""

from itertools import combinations
from typing import List, Optional, Sequence

import numpy as np
import structlog
from scipy.spatial.distance import pdist, squareform

from ..axioms.metrics import check_symmetric_g
from ..config import BalkConfig, resolve
from ..core.bitsets import MAX_UNIVERSE, popcounts
from ..core.tables import FiniteMetric, GMetricTable, SetFunction
from ..core.tolerance import Tolerance
from ..core.universe import Universe
from ..exceptions import ConstructionError, InputError
from .diameters import max_pair_table

logger = structlog.get_logger()

REPAIR_MAX_N = 8


def default_steps(k: int) -> List[float]:
    """t_2 .. t_{k+2}: t_i = 1 + (i-1)/(k+2) up to k+1, then t_{k+2} = 1 + (k-0.5)/(k+2)."""
    steps = [1 + (i - 1) / (k + 2) for i in range(2, k + 2)]
    steps.append(1 + (k - 0.5) / (k + 2))
    return steps


def _validate_steps(k: int, t: Sequence[float]) -> None:
    if len(t) != k + 1:
        raise InputError(f"t must list t_2 .. t_{k + 2} ({k + 1} values), got {len(t)}")
    for i, value in enumerate(t, start=2):
        if not 1 < value < 2:
            raise InputError(f"t_{i} = {value} must lie in (1, 2)")
    for i in range(2, k):
        if not t[i - 2] < t[i - 1]:
            raise InputError(f"t_{i} < t_{i + 1} is violated")
    t_k, t_k1, t_k2 = t[k - 2], t[k - 1], t[k]
    if not t_k < t_k2 < t_k1:
        raise InputError(f"t_{k} < t_{k + 2} < t_{k + 1} is violated")


def stepped_cardinality_metric(
    n: int,
    k: int,
    t: Optional[Sequence[float]] = None,
    universe: Optional[Universe] = None,
) -> SetFunction:
    """
    tau(A) = 0 for |A| = 1, t_|A| for 2 <= |A| <= k+1 and t_{k+2} beyond.

    Args:
        n: Universe size, at least k + 2
        k: At least 2
        t: t_2 .. t_{k+2} in (1, 2) with t_2 < ... < t_k and t_k < t_{k+2} < t_{k+1}
        universe: Labels; x0 .. x{n-1} when omitted

    Raises:
        InputError: naming the violated constraint
    """
    if k < 2:
        raise InputError(f"k must be at least 2, got {k}")
    if n < k + 2:
        raise InputError(f"n must be at least k + 2 = {k + 2}, got {n}")
    if n > MAX_UNIVERSE:
        raise InputError(f"n must be at most {MAX_UNIVERSE}, got {n}")
    steps = list(t) if t is not None else default_steps(k)
    _validate_steps(k, steps)
    universe = universe or Universe.indexed(n)
    if universe.n != n:
        raise InputError(f"universe has {universe.n} labels, expected {n}")

    by_size = np.empty(n + 1)
    by_size[0] = np.nan
    by_size[1] = 0.0
    for size in range(2, n + 1):
        by_size[size] = steps[min(size, k + 2) - 2]
    return SetFunction(universe, by_size[popcounts(n)[1:]])


def random_metric(n: int, seed: int, universe: Optional[Universe] = None) -> FiniteMetric:
    """Straight-line distances of n seeded uniform points in the unit square."""
    if n < 1:
        raise InputError(f"n must be at least 1, got {n}")
    if n > MAX_UNIVERSE:
        raise InputError(f"n must be at most {MAX_UNIVERSE}, got {n}")
    points = np.random.default_rng(seed).random((n, 2))
    dist = squareform(pdist(points)) if n > 1 else np.zeros((1, 1))
    return FiniteMetric(universe or Universe.indexed(n), dist)


def max_pairwise_g(d: FiniteMetric) -> GMetricTable:
    """G(x, y, z) = max(d(x, y), d(x, z), d(y, z))."""
    D = d.dist
    cube = np.maximum(np.maximum(D[:, :, None], D[:, None, :]), D[None, :, :])
    return GMetricTable.from_cube(d.universe, cube)


def perturbed_symmetric_g(
    d: FiniteMetric,
    seed: int,
    strength: float = 0.25,
    max_attempts: int = 100,
    tol: Optional[Tolerance] = None,
    config: Optional[BalkConfig] = None,
) -> GMetricTable:
    """
    Raise the distinct-triple entries of max_pairwise_g(d) by seeded factors in
    [1, 1 + strength] and keep the first draw that passes check_symmetric_g.

    Raises:
        ConstructionError: no accepted draw within max_attempts
    """
    _, tol = resolve(config, tol)
    base = max_pairwise_g(d).cube
    n = d.n
    rng = np.random.default_rng(seed)
    triples = list(combinations(range(n), 3))
    for attempt in range(1, max_attempts + 1):
        cube = base.copy()
        factors = 1.0 + strength * rng.random(len(triples))
        for (x, y, z), factor in zip(triples, factors):
            value = base[x, y, z] * factor
            for a, b, c in ((x, y, z), (x, z, y), (y, x, z), (y, z, x), (z, x, y), (z, y, x)):
                cube[a, b, c] = value
        table = GMetricTable.from_cube(d.universe, cube)
        if check_symmetric_g(table, tol).passed:
            logger.debug("perturbed_g_accepted", attempt=attempt, n=n)
            return table
    raise ConstructionError(f"no perturbed table passed check_symmetric_g in {max_attempts} attempts")


def _closure_step(table: np.ndarray, n: int) -> np.ndarray:
    masks = np.arange(1, 1 << n, dtype=np.int64)
    union_idx = masks[:, None] | masks[None, :]
    union = table[union_idx]
    through = (union[:, :, None] + union[None, :, :]).min(axis=1)  # min over C of tau(A|C) + tau(C|B)
    result = table.copy()
    np.minimum.at(result, union_idx.ravel(), through.ravel())
    return result


def repaired_perturbation(
    d: FiniteMetric,
    seed: int,
    strength: float = 0.5,
    max_rounds: int = 64,
) -> SetFunction:
    """
    Compatible extended metric above diam_d that is generally not diameter-generated.

    tau on sets of size >= 3 is raised by seeded factors in [1, 1 + strength],
    then lowered by the closure tau(A|B) <- min(tau(A|B), tau(A|C) + tau(C|B))
    until it is stable. Values never drop below the diameter, so pairs and
    singletons are untouched.

    Raises:
        InputError: more than REPAIR_MAX_N points
        ConstructionError: no fixed point within max_rounds
    """
    n = d.n
    if n > REPAIR_MAX_N:
        raise InputError(f"repair closure is limited to n <= {REPAIR_MAX_N}, got {n}")
    base = max_pair_table(d.dist)
    rng = np.random.default_rng(seed)
    factors = 1.0 + strength * rng.random(base.size)
    table = np.where(popcounts(n) >= 3, base * factors, base)
    for round_ in range(1, max_rounds + 1):
        repaired = _closure_step(table, n)
        if np.array_equal(repaired, table):
            logger.debug("repair_converged", rounds=round_, n=n)
            return SetFunction.from_table(d.universe, table)
        table = repaired
    raise ConstructionError(f"repair closure did not settle in {max_rounds} rounds")
