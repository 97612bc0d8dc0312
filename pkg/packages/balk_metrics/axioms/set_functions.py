"""
Axiom checkers for set functions.

check_balk and check_ultra_balk enumerate every triple (A, B, C) of nonempty
subsets up to the exhaustive cap and sample uniformly above it. For each A
the row tau(A | X) is combined against the precomputed union matrix
tau(C | B), so the minimal right side over all C is one numpy reduction.

The monotonicity checkers use sum-over-subsets max transforms with argmax
tracking, which examines every pair B <= A implicitly.
"""

from math import comb
from typing import Callable, Optional, Tuple

import numpy as np
import structlog
from tqdm import tqdm

from ..config import BalkConfig, CheckReport, Verdict, Witness, resolve
from ..core.bitsets import popcounts, proper_subset_max, subset_max
from ..core.tables import SetFunction
from ..core.tolerance import Tolerance
from ..core.universe import canonical_subset_key
from ..exceptions import InputError
from .witness import shrink_witness

logger = structlog.get_logger()

Combine = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _report(
    check: str,
    tol: Tolerance,
    examined: int,
    witness: Optional[Witness] = None,
    sampled: bool = False,
    notes=None,
) -> CheckReport:
    if witness is not None:
        verdict = Verdict.FAIL
    else:
        verdict = Verdict.SAMPLED_PASS if sampled else Verdict.PASS
    return CheckReport(
        check=check,
        verdict=verdict,
        witness=witness,
        triples_examined=int(examined),
        epsilon=tol.eps,
        tolerance_mode=tol.mode,
        notes=list(notes or []),
    )


def _key(tau: SetFunction, mask) -> str:
    return canonical_subset_key(int(mask), tau.universe)


# ============================================================================
# Zero iff singleton
# ============================================================================

def zero_iff_singleton_witness(tau: SetFunction, tol: Tolerance) -> Optional[Witness]:
    """
    Witness for tau(A) = 0 <=> |A| = 1, or None when it holds.

    The smallest violating A is reported; positivity is tested as value > eps.
    """
    sizes = popcounts(tau.n)[1:]
    values = tau.values
    singles = sizes == 1
    bad = (singles & ~tol.eq(values, 0.0)) | (~singles & ~tol.positive(values))
    if not bad.any():
        return None
    candidates = np.flatnonzero(bad)
    pick = int(candidates[np.argmin(sizes[candidates])])
    mask = pick + 1
    value = float(values[pick])
    return Witness(
        condition="zero-iff-singleton",
        A=_key(tau, mask),
        lhs=value,
        rhs=0.0,
        relation="==" if singles[pick] else ">",
        tolerance_boundary=bool(not singles[pick] and tol.on_boundary(value)),
    )


# ============================================================================
# Triangle-type inequalities over triples
# ============================================================================

def _triangle_relation(table: np.ndarray, combine: Combine, tol: Tolerance) -> Callable[[Tuple[int, ...]], bool]:
    def violates(parts: Tuple[int, ...]) -> bool:
        a, b, c = parts
        lhs = table[a | b]
        rhs = combine(table[a | c], table[c | b])
        return bool(tol.exceeds(lhs, rhs))
    return violates


def _best_violation(pc: np.ndarray, a, b, c):
    cost = pc[a] + pc[b] + pc[c]
    j = int(np.argmin(cost))
    return int(cost[j]), int(a), int(b[j]), int(c[j])


def _sweep_exhaustive(table: np.ndarray, n: int, combine: Combine, tol: Tolerance, progress: bool):
    masks = np.arange(1, 1 << n, dtype=np.int64)
    pc = popcounts(n).astype(np.int64)
    union = table[masks[:, None] | masks[None, :]]
    columns = np.arange(masks.size)
    best = None
    for a in tqdm(masks, desc="triples", disable=not progress, leave=False):
        row = table[a | masks]
        candidates = combine(row[:, None], union)
        c_idx = candidates.argmin(axis=0)
        rhs = candidates[c_idx, columns]
        violating = tol.exceeds(row, rhs)
        if not violating.any():
            continue
        bs = np.flatnonzero(violating)
        found = _best_violation(pc, a, masks[bs], masks[c_idx[bs]])
        if best is None or found[0] < best[0]:
            best = found
    return None if best is None else best[1:]


def _sweep_sampled(table: np.ndarray, n: int, combine: Combine, tol: Tolerance, budget: int, seed: int):
    rng = np.random.default_rng(seed)
    pc = popcounts(n).astype(np.int64)
    top = 1 << n
    remaining = budget
    chunk = 1 << 20
    while remaining > 0:
        size = min(chunk, remaining)
        a = rng.integers(1, top, size=size)
        b = rng.integers(1, top, size=size)
        c = rng.integers(1, top, size=size)
        lhs = table[a | b]
        rhs = combine(table[a | c], table[c | b])
        violating = tol.exceeds(lhs, rhs)
        if violating.any():
            idx = np.flatnonzero(violating)
            cost = pc[a[idx]] + pc[b[idx]] + pc[c[idx]]
            j = idx[int(np.argmin(cost))]
            return int(a[j]), int(b[j]), int(c[j])
        remaining -= size
    return None


def _check_triples(
    tau: SetFunction,
    check: str,
    combine: Combine,
    relation: str,
    tol: Tolerance,
    config: BalkConfig,
) -> CheckReport:
    n = tau.n
    table = tau.table
    total = (tau.universe.size - 1) ** 3
    sampled = n > config.exhaustive_max_n
    if sampled:
        found = _sweep_sampled(table, n, combine, tol, config.sample_budget, config.seed)
        examined = config.sample_budget
    else:
        found = _sweep_exhaustive(table, n, combine, tol, config.show_progress)
        examined = total

    if found is None:
        logger.info("triple_check_completed", check=check, n=n, verdict="pass", sampled=sampled)
        return _report(check, tol, examined, sampled=sampled)

    violates = _triangle_relation(table, combine, tol)
    a, b, c = shrink_witness(found, violates, config.witness_search_rounds)
    lhs = float(table[a | b])
    rhs = float(combine(table[a | c], table[c | b]))
    witness = Witness(
        condition="triangle",
        A=_key(tau, a),
        B=_key(tau, b),
        C=_key(tau, c),
        lhs=lhs,
        rhs=rhs,
        relation=relation,
    )
    logger.info("triple_check_completed", check=check, n=n, verdict="fail", witness=witness.model_dump(by_alias=True))
    return _report(check, tol, examined, witness=witness, sampled=sampled)


def check_balk(tau: SetFunction, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None) -> CheckReport:
    """
    Check the extended-metric axioms.

    tau(A) = 0 iff |A| = 1, and tau(A | B) <= tau(A | C) + tau(C | B) for all
    nonempty A, B, C.

    Args:
        tau: Candidate set function
        tol: Comparison tolerance (config default when omitted)
        config: Enumeration caps, budget and seed

    Returns:
        CheckReport; sampled-pass above config.exhaustive_max_n
    """
    config, tol = resolve(config, tol)
    witness = zero_iff_singleton_witness(tau, tol)
    if witness is not None:
        return _report("balk", tol, tau.universe.size - 1, witness=witness)
    return _check_triples(tau, "balk", np.add, "<= sum", tol, config)


def check_ultra_balk(
    tau: SetFunction, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None
) -> CheckReport:
    """Check tau(A | B) <= max(tau(A | C), tau(B | C)) for all nonempty triples."""
    config, tol = resolve(config, tol)
    return _check_triples(tau, "ultra", np.maximum, "<= max", tol, config)


# ============================================================================
# Monotonicity
# ============================================================================

def _pair_witness(tau: SetFunction, condition: str, a: int, b: int, lhs: float, rhs: float) -> Witness:
    return Witness(condition=condition, A=_key(tau, a), B=_key(tau, b), lhs=lhs, rhs=rhs, relation="<=")


def _smallest(candidates: np.ndarray, pc: np.ndarray, partner: np.ndarray) -> int:
    cost = pc[candidates].astype(np.int64) + pc[partner[candidates]]
    return int(candidates[int(np.argmin(cost))])


def _require_k(k: int) -> None:
    if k < 2:
        raise InputError(f"k must be at least 2, got {k}")


def check_increasing(
    tau: SetFunction, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None
) -> CheckReport:
    """
    Check tau(B) <= tau(A) whenever B is a subset of A.

    The witness pair is (A, B) with B the largest-valued proper subset of A.
    """
    config, tol = resolve(config, tol)
    n = tau.n
    pc = popcounts(n)
    best, arg = proper_subset_max(tau.table, n)
    examined = 3 ** n - 2 ** n
    violating = tol.exceeds(best[1:], tau.values)
    if not violating.any():
        return _report("increasing", tol, examined)
    a = _smallest(np.flatnonzero(violating) + 1, pc, arg)
    b = int(arg[a])
    witness = _pair_witness(tau, "monotone", a, b, float(tau.table[b]), float(tau.table[a]))
    return _report("increasing", tol, examined, witness=witness)


def _small_subset_pairs(n: int, k: int) -> int:
    return sum(comb(n, a) * sum(comb(a, b) for b in range(1, min(k, a) + 1)) for a in range(1, n + 1))


def check_k_increasing(
    tau: SetFunction, k: int, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None
) -> CheckReport:
    """
    Check tau(B) <= tau(A) for every B <= A with |B| <= k.

    Raises:
        InputError: k < 2
    """
    _require_k(k)
    config, tol = resolve(config, tol)
    n = tau.n
    pc = popcounts(n)
    small = np.where(pc <= k, tau.table, -np.inf)
    best, arg = subset_max(small, n)
    examined = _small_subset_pairs(n, k)
    violating = tol.exceeds(best[1:], tau.values)
    if not violating.any():
        return _report(f"{k}-increasing", tol, examined)
    a = _smallest(np.flatnonzero(violating) + 1, pc, arg)
    b = int(arg[a])
    witness = _pair_witness(tau, f"{k}-monotone", a, b, float(tau.table[b]), float(tau.table[a]))
    return _report(f"{k}-increasing", tol, examined, witness=witness)


def check_k_weakly_decreasing(
    tau: SetFunction, k: int, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None
) -> CheckReport:
    """
    Check that every A with |A| > k has a proper nonempty B with tau(B) >= tau(A).

    The witness is an A without such a B; B names its best proper subset and
    the sides are (tau(A), max over proper subsets).

    Raises:
        InputError: k < 2
    """
    _require_k(k)
    config, tol = resolve(config, tol)
    n = tau.n
    pc = popcounts(n)
    best, arg = proper_subset_max(tau.table, n)
    large = pc[1:] > k
    examined = int(large.sum())
    violating = large & tol.exceeds(tau.values, best[1:])
    if not violating.any():
        return _report(f"{k}-weakly-decreasing", tol, examined)
    a = _smallest(np.flatnonzero(violating) + 1, pc, arg)
    b = int(arg[a])
    witness = Witness(
        condition="dominating-subset",
        A=_key(tau, a),
        B=_key(tau, b),
        lhs=float(tau.table[a]),
        rhs=float(best[a]),
        relation="<=",
    )
    return _report(f"{k}-weakly-decreasing", tol, examined, witness=witness)
