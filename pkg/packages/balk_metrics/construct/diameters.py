"""
Diameters and projections.

diameter_balk turns a metric into the set function A -> max pairwise
distance; tau_squared and project_tau_k read a set function back on tuples;
generalized_diameter is the max of tau over subsets of bounded size.
"""

from typing import Optional, Sequence

import numpy as np
import structlog

from ..axioms.metrics import check_metric
from ..axioms.set_functions import check_balk
from ..config import BalkConfig, ConstructionResult, resolve
from ..core.bitsets import popcounts, submask_array, subset_max
from ..core.tables import FiniteMetric, SetFunction
from ..core.tolerance import Tolerance
from ..core.universe import check_subset, image_set
from ..exceptions import InputError

logger = structlog.get_logger()


def max_pair_table(dist: np.ndarray) -> np.ndarray:
    """
    Dense table of max pairwise distance for every mask (0 on singletons).

    Built by adding one element at a time: for masks whose top element is b,
    value = max(value of the rest, max distance from b to the rest).
    """
    n = dist.shape[0]
    table = np.zeros(1 << n)
    for b in range(n):
        low = 1 << b
        reach = np.zeros(low)
        for c in range(b):
            step = 1 << c
            reach[step:2 * step] = np.maximum(reach[:step], dist[b, c])
        table[low:2 * low] = np.maximum(table[:low], reach)
    return table


def diameter_balk(d: FiniteMetric, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None) -> SetFunction:
    """
    The set function A -> diam_d(A).

    Raises:
        InputError: d fails check_metric
    """
    _, tol = resolve(config, tol)
    report = check_metric(d, tol)
    if not report.passed:
        raise InputError(f"not a metric: {report.witness.condition} fails at {report.witness.points}")
    return SetFunction.from_table(d.universe, max_pair_table(d.dist))


def tau_squared(tau: SetFunction) -> FiniteMetric:
    """
    Binary projection: dist[i][j] = tau({i, j}), 0 on the diagonal.

    The result is a metric when tau satisfies the extended-metric axioms;
    otherwise it is still computed and callers should run check_metric on it.
    """
    n = tau.n
    bits = 1 << np.arange(n, dtype=np.int64)
    dist = tau.table[bits[:, None] | bits[None, :]]
    np.fill_diagonal(dist, 0.0)
    return FiniteMetric(tau.universe, dist)


def checked_tau_squared(
    tau: SetFunction, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None
) -> ConstructionResult:
    """
    tau_squared with its qualifying reports.

    precondition is check_balk on tau. When it fails the projection is still
    returned, a warning is logged and check_metric on it is attached as check.
    """
    config, tol = resolve(config, tol)
    balk = check_balk(tau, tol, config)
    d = tau_squared(tau)
    if balk.passed:
        return ConstructionResult(table=d, precondition=balk)
    logger.warning("tau_squared_input_not_balk", witness=balk.witness.model_dump(by_alias=True))
    return ConstructionResult(table=d, precondition=balk, check=check_metric(d, tol, config))


def project_tau_k(tau: SetFunction, points: Sequence[int]) -> float:
    """tau(Im(x_1, ..., x_k)); invariant under permutation and repetition."""
    return tau.evaluate(image_set(points, tau.universe))


def generalized_diameter(tau: SetFunction, k: int, mask: int) -> float:
    """
    max of tau(B) over nonempty B <= A with |B| <= k.

    Raises:
        InputError: k < 1 or A empty
    """
    if k < 1:
        raise InputError(f"k must be at least 1, got {k}")
    check_subset(mask, tau.universe)
    subs = submask_array(mask)[1:]
    subs = subs[popcounts(tau.n)[subs] <= k]
    return float(tau.table[subs].max())


def generalized_diameter_table(tau: SetFunction, k: int) -> SetFunction:
    """generalized_diameter(tau, k, A) for every A at once."""
    if k < 1:
        raise InputError(f"k must be at least 1, got {k}")
    small = np.where(popcounts(tau.n) <= k, tau.table, -np.inf)
    best, _ = subset_max(small, tau.n)
    return SetFunction.from_table(tau.universe, best)
