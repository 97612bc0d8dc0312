"""
Conversions between symmetric G-metrics and extended metrics.

g_to_partial reads a symmetric G table as a set function on subsets of size
at most 3; extend_partial takes the max over bounded-size subsets after
verifying the hypotheses that make the result an increasing extended metric;
g_to_balk composes the two; balk_to_g goes back via tau(Im(x, y, z)).
"""

from itertools import combinations
from typing import Dict, Optional

import numpy as np
import structlog

from ..axioms.metrics import check_g_metric, check_symmetric_g
from ..axioms.set_functions import check_increasing
from ..config import BalkConfig, CheckReport, ConstructionResult, Verdict, Witness, resolve
from ..core.bitsets import popcounts, proper_subset_max, submask_array, subset_max
from ..core.tables import GMetricTable, SetFunction
from ..core.tolerance import Tolerance
from ..core.universe import canonical_subset_key
from ..exceptions import ConstructionError, InputError
from .partial import PartialSetFunction

logger = structlog.get_logger()


def _precondition_failure(tol: Tolerance, examined: int, witness: Witness) -> ConstructionError:
    report = CheckReport(
        check="extension-preconditions",
        verdict=Verdict.FAIL,
        witness=witness,
        triples_examined=examined,
        epsilon=tol.eps,
        tolerance_mode=tol.mode,
    )
    return ConstructionError(f"partial table violates {witness.condition}", report=report)


def g_to_partial(g: GMetricTable, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None) -> PartialSetFunction:
    """
    tau~({x}) = G(x,x,x), tau~({x,y}) = G(x,y,y), tau~({x,y,z}) = G(x,y,z).

    Raises:
        ConstructionError: G(x,y,y) != G(x,x,y) for some pair, so tau~ would
            not be well defined
    """
    _, tol = resolve(config, tol)
    G = g.cube
    n = g.n
    u = g.universe
    for x, y in combinations(range(n), 2):
        if not tol.eq(G[x, y, y], G[x, x, y]):
            witness = Witness(
                condition="symmetry",
                points=[u.names[x], u.names[y]],
                lhs=float(G[x, y, y]),
                rhs=float(G[x, x, y]),
                relation="==",
            )
            report = CheckReport(check="symmetric-g", verdict=Verdict.FAIL, witness=witness,
                                 triples_examined=n * n, epsilon=tol.eps, tolerance_mode=tol.mode)
            raise ConstructionError(
                f"G({u.names[x]},{u.names[y]},{u.names[y]}) != G({u.names[x]},{u.names[x]},{u.names[y]})",
                report=report,
            )

    values: Dict[int, float] = {}
    for x in range(n):
        values[1 << x] = float(G[x, x, x])
    for x, y in combinations(range(n), 2):
        values[(1 << x) | (1 << y)] = float(G[x, y, y])
    for x, y, z in combinations(range(n), 3):
        values[(1 << x) | (1 << y) | (1 << z)] = float(G[x, y, z])
    return PartialSetFunction(u, 3, values)


def _check_zero_iff_singleton(pt: PartialSetFunction, tol: Tolerance, small: np.ndarray, pc: np.ndarray) -> None:
    for mask in small:
        value = pt.table[mask]
        if pc[mask] == 1 and not tol.eq(value, 0.0):
            relation = "=="
        elif pc[mask] > 1 and not tol.positive(value):
            relation = ">"
        else:
            continue
        raise _precondition_failure(tol, small.size, Witness(
            condition="zero-iff-singleton", A=canonical_subset_key(int(mask), pt.universe),
            lhs=float(value), rhs=0.0, relation=relation,
            tolerance_boundary=bool(relation == ">" and tol.on_boundary(value))))


def _check_increasing(pt: PartialSetFunction, tol: Tolerance, inside: np.ndarray, pc: np.ndarray) -> None:
    restricted = np.where(inside, pt.table, -np.inf)
    best, arg = proper_subset_max(restricted, pt.n)
    bad = inside & tol.exceeds(best, np.where(inside, pt.table, np.inf))
    if bad.any():
        a = int(np.flatnonzero(bad)[0])
        b = int(arg[a])
        raise _precondition_failure(tol, int(inside.sum()), Witness(
            condition="monotone", A=canonical_subset_key(a, pt.universe), B=canonical_subset_key(b, pt.universe),
            lhs=float(pt.table[b]), rhs=float(pt.table[a]), relation="<="))


def _check_restricted_triangle(pt: PartialSetFunction, tol: Tolerance, small: np.ndarray, pc: np.ndarray) -> int:
    """
    tau~(A|B) <= tau~(A|C) + tau~(C|B) whenever all three unions have size <= k_cap.

    Monotonicity is verified first, so C can be taken to be a single point:
    shrinking C to one of its elements only lowers the right side and keeps
    the unions inside the bound.
    """
    t = pt.table
    k = pt.k_cap
    points = 1 << np.arange(pt.n, dtype=np.int64)
    examined = 0
    for union in small:
        subs = submask_array(int(union))[1:]
        a = np.repeat(subs, subs.size)
        b = np.tile(subs, subs.size)
        keep = (a | b) == union
        a, b = a[keep], b[keep]
        ac = a[:, None] | points[None, :]
        bc = b[:, None] | points[None, :]
        valid = (pc[ac] <= k) & (pc[bc] <= k)
        lhs = t[union]
        with np.errstate(invalid="ignore"):
            rhs = np.where(valid, t[ac] + t[bc], np.inf)
        examined += int(valid.sum())
        bad = tol.exceeds(lhs, rhs) & valid
        if bad.any():
            i, c = (int(v) for v in np.argwhere(bad)[0])
            u = pt.universe
            raise _precondition_failure(tol, examined, Witness(
                condition="restricted-triangle", A=canonical_subset_key(int(a[i]), u),
                B=canonical_subset_key(int(b[i]), u), C=canonical_subset_key(int(points[c]), u),
                lhs=float(lhs), rhs=float(rhs[i, c]), relation="<= sum"))
    return examined


def extend_partial(
    pt: PartialSetFunction, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None
) -> SetFunction:
    """
    tau(A) = max{tau~(B) : B <= A, |B| <= k_cap}.

    Verifies first that tau~ is zero exactly on singletons, increasing on its
    domain and satisfies the triangle inequality whenever all unions stay
    inside the domain.

    Raises:
        InputError: k_cap < 2 (the extension is not an extended metric in general)
        ConstructionError: a precondition fails; the report carries the witness
    """
    _, tol = resolve(config, tol)
    if pt.k_cap < 2:
        raise InputError("extension needs k_cap >= 2; bounded data of size 1 does not determine an extended metric")
    pc = popcounts(pt.n)
    inside = (pc >= 1) & (pc <= pt.k_cap)
    small = np.flatnonzero(inside)
    _check_zero_iff_singleton(pt, tol, small, pc)
    _check_increasing(pt, tol, inside, pc)
    examined = _check_restricted_triangle(pt, tol, small, pc)

    best, _ = subset_max(np.where(inside, pt.table, -np.inf), pt.n)
    logger.info("partial_extended", n=pt.n, k_cap=pt.k_cap, triangle_instances=examined)
    return SetFunction.from_table(pt.universe, best)


def g_to_balk(g: GMetricTable, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None) -> SetFunction:
    """
    Increasing extended metric tau with tau(Im(x, y, z)) = G(x, y, z).

    Raises:
        ConstructionError: G is not a symmetric G-metric, or the extension
            preconditions fail on a table that passed (flagged as an inconsistency)
    """
    config, tol = resolve(config, tol)
    report = check_symmetric_g(g, tol)
    if not report.passed:
        raise ConstructionError(f"input is not a symmetric G-metric ({report.witness.condition})", report=report)
    try:
        return extend_partial(g_to_partial(g, tol), tol)
    except ConstructionError as e:
        logger.error("g_to_balk_inconsistency", reason=str(e))
        raise ConstructionError(
            f"checker/tolerance inconsistency: symmetric G-metric failed extension preconditions: {e}",
            report=e.report,
            inconsistency=True,
        ) from e


def _g_cube(tau: SetFunction) -> GMetricTable:
    bits = 1 << np.arange(tau.n, dtype=np.int64)
    masks = bits[:, None, None] | bits[None, :, None] | bits[None, None, :]
    return GMetricTable.from_cube(tau.universe, tau.table[masks])


def balk_to_g(tau: SetFunction, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None) -> GMetricTable:
    """
    G(x, y, z) = tau(Im(x, y, z)).

    A non-increasing tau still yields a table, but the G-metric guarantee is
    void; a warning is logged. checked_balk_to_g also checks the result.
    """
    return checked_balk_to_g(tau, tol, config).table


def checked_balk_to_g(
    tau: SetFunction, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None
) -> ConstructionResult:
    """
    balk_to_g with its qualifying reports.

    precondition is check_increasing on tau. When it fails, check_g_metric
    runs on the table and its report is attached as check.
    """
    config, tol = resolve(config, tol)
    monotone = check_increasing(tau, tol, config)
    g = _g_cube(tau)
    if monotone.passed:
        return ConstructionResult(table=g, precondition=monotone)
    logger.warning("balk_to_g_input_not_increasing", witness=monotone.witness.model_dump(by_alias=True))
    return ConstructionResult(table=g, precondition=monotone, check=check_g_metric(g, tol, config))
