"""
Clause-by-clause oracles for the diameter characterisations.

Each oracle evaluates every clause of an equivalence independently on one
object and reports whether the verdicts agree. Disagreement means an
implementation defect, never a counterexample to the statement.

Existence clauses ("some binary / ternary table generates tau") are decided
through the canonical candidate tau^2 or tau^3: if any table generates tau,
the canonical one does.
"""

from typing import Dict, List, Optional, Tuple

import numpy as np
import structlog

from ..axioms.metrics import check_metric, check_symmetric_g
from ..axioms.set_functions import (
    check_balk,
    check_increasing,
    check_k_increasing,
    check_k_weakly_decreasing,
)
from ..config import BalkConfig, CheckReport, ClauseVerdict, EquivalenceReport, Verdict, resolve
from ..construct.conversions import balk_to_g
from ..construct.diameters import generalized_diameter_table, max_pair_table, tau_squared
from ..core.bitsets import mask_members
from ..core.tables import SetFunction
from ..core.tolerance import Tolerance
from ..core.universe import canonical_subset_key
from ..exceptions import InputError

logger = structlog.get_logger()

CANONICAL_CANDIDATE_NOTE = (
    "existence clauses are decided through the canonical candidate "
    "(tau^2 for binary tables, tau^3 for ternary tables)"
)


def require_extended_metric(tau: SetFunction, tol: Tolerance, config: BalkConfig) -> None:
    """
    Raise InputError unless tau passes check_balk and is small enough for an oracle.
    """
    if tau.n > config.oracle_max_n:
        raise InputError(f"oracles accept at most {config.oracle_max_n} points, got {tau.n}")
    report = check_balk(tau, tol, config)
    if not report.passed:
        w = report.witness
        raise InputError(f"input is not an extended metric: {w.condition} fails ({w.lhs} vs {w.rhs})")


def _clause(clause_id: str, ok: bool, detail: Optional[str] = None) -> ClauseVerdict:
    return ClauseVerdict(id=clause_id, verdict=Verdict.PASS if ok else Verdict.FAIL, detail=None if ok else detail)


def _from_reports(clause_id: str, *reports: CheckReport) -> ClauseVerdict:
    for report in reports:
        if not report.passed:
            return _clause(clause_id, False, f"{report.check}: {report.witness.condition}")
    return _clause(clause_id, True)


def _equal_everywhere(tau: SetFunction, other: np.ndarray, tol: Tolerance) -> Tuple[bool, Optional[str]]:
    """Compare tau with a dense table on every nonempty subset."""
    bad = ~tol.eq(tau.values, other[1:])
    if not bad.any():
        return True, None
    mask = int(np.flatnonzero(bad)[0]) + 1
    key = canonical_subset_key(mask, tau.universe)
    return False, f"{key}: {tau.table[mask]} vs {other[mask]}"


def _assemble(theorem: str, k: Optional[int], clauses: List[ClauseVerdict], notes: List[str]) -> EquivalenceReport:
    verdicts = {c.verdict for c in clauses}
    agree = len(verdicts) <= 1
    disagreement: Optional[Dict] = None
    if not agree:
        disagreement = {c.id: {"verdict": c.verdict.value, "detail": c.detail} for c in clauses}
        logger.error("equivalence_disagreement", theorem=theorem, k=k, clauses=disagreement)
    return EquivalenceReport(
        theorem=theorem, k=k, clauses=clauses, agree=agree, disagreement_witness=disagreement, notes=notes
    )


def verify_k_diameter_equivalence(
    tau: SetFunction, k: int, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None
) -> EquivalenceReport:
    """
    tau = diam_{tau^k}  <=>  k-increasing and k-weakly decreasing
                        <=>  increasing and k-weakly decreasing.

    Raises:
        InputError: k < 2 or tau is not an extended metric
    """
    if k < 2:
        raise InputError(f"k must be at least 2, got {k}")
    config, tol = resolve(config, tol)
    require_extended_metric(tau, tol, config)

    ok, detail = _equal_everywhere(tau, generalized_diameter_table(tau, k).table, tol)
    weakly = check_k_weakly_decreasing(tau, k, tol, config)
    clauses = [
        _clause("i", ok, detail),
        _from_reports("ii", check_k_increasing(tau, k, tol, config), weakly),
        _from_reports("iii", check_increasing(tau, tol, config), weakly),
    ]
    return _assemble("k-diameter", k, clauses, [])


def _max_over_pairs(mu: np.ndarray, n: int) -> np.ndarray:
    table = np.full(1 << n, np.nan)
    for mask in range(1, 1 << n):
        idx = mask_members(mask)
        table[mask] = mu[np.ix_(idx, idx)].max()
    return table


def _max_over_triples(cube: np.ndarray, n: int) -> np.ndarray:
    table = np.full(1 << n, np.nan)
    for mask in range(1, 1 << n):
        idx = mask_members(mask)
        table[mask] = cube[np.ix_(idx, idx, idx)].max()
    return table


def verify_pair_generated_equivalence(
    tau: SetFunction, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None
) -> EquivalenceReport:
    """
    Five equivalent forms of "tau is the diameter of a metric":
    (i) some binary table mu has tau(A) = max of mu over pairs of A;
    (ii) same with mu a metric; (iii) tau = diameter of tau^2;
    (iv) 2-increasing and 2-weakly decreasing;
    (v) increasing and 2-weakly decreasing.
    """
    config, tol = resolve(config, tol)
    require_extended_metric(tau, tol, config)
    n = tau.n
    mu = tau_squared(tau)

    by_pairs = _max_over_pairs(mu.dist, n)
    ok_pairs, detail_pairs = _equal_everywhere(tau, by_pairs, tol)
    metric_report = check_metric(mu, tol)
    ok_diam, detail_diam = _equal_everywhere(tau, max_pair_table(mu.dist), tol)
    if not metric_report.passed:
        ok_diam, detail_diam = False, "tau^2 is not a metric"
    weakly = check_k_weakly_decreasing(tau, 2, tol, config)

    clauses = [
        _clause("i", ok_pairs, detail_pairs),
        _clause("ii", ok_pairs and metric_report.passed, detail_pairs or "tau^2 is not a metric"),
        _clause("iii", ok_diam, detail_diam),
        _from_reports("iv", check_k_increasing(tau, 2, tol, config), weakly),
        _from_reports("v", check_increasing(tau, tol, config), weakly),
    ]
    return _assemble("pair-generated", 2, clauses, [CANONICAL_CANDIDATE_NOTE])


def verify_triple_generated_equivalence(
    tau: SetFunction, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None
) -> EquivalenceReport:
    """
    Five equivalent forms of "tau is determined by triples":
    (i) some ternary table G has tau(A) = max of G over triples of A;
    (ii) same with G a symmetric G-metric; (iii) tau(A) = max over triples of
    tau(Im(x, y, z)); (iv) 3-increasing and 3-weakly decreasing;
    (v) increasing and 3-weakly decreasing.
    """
    config, tol = resolve(config, tol)
    require_extended_metric(tau, tol, config)
    n = tau.n
    g = balk_to_g(tau, tol, config)

    ok_triples, detail_triples = _equal_everywhere(tau, _max_over_triples(g.cube, n), tol)
    ok_g = ok_triples and check_symmetric_g(g, tol).passed
    ok_proj, detail_proj = _equal_everywhere(tau, generalized_diameter_table(tau, 3).table, tol)
    weakly = check_k_weakly_decreasing(tau, 3, tol, config)

    clauses = [
        _clause("i", ok_triples, detail_triples),
        _clause("ii", ok_g, detail_triples or "tau^3 is not a symmetric G-metric"),
        _clause("iii", ok_proj, detail_proj),
        _from_reports("iv", check_k_increasing(tau, 3, tol, config), weakly),
        _from_reports("v", check_increasing(tau, tol, config), weakly),
    ]
    return _assemble("triple-generated", 3, clauses, [CANONICAL_CANDIDATE_NOTE])
