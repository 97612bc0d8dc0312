"""
Inequality oracles for extended metrics compatible with d = tau^2.

- chain bound: tau({x_1..x_m}) <= d(x_1,x_2) + ... + d(x_{m-1},x_m) for every
  enumeration of every subset
- perturbation bound: |tau({x_i}) - tau({x'_i})| <= sum d(x_i, x'_i) for
  aligned tuples (repetition allowed)
- half-pair bound: tau(K) >= max_{x,y in K} d(x,y) / 2
"""

from functools import lru_cache
from itertools import permutations, product
from typing import Optional, Tuple

import numpy as np
import structlog
from tqdm import tqdm

from ..config import BalkConfig, CheckReport, Verdict, Witness, resolve
from ..construct.diameters import max_pair_table, tau_squared
from ..core.bitsets import mask_members
from ..core.tables import SetFunction
from ..core.tolerance import Tolerance
from ..core.universe import canonical_subset_key
from .equivalences import require_extended_metric

logger = structlog.get_logger()


@lru_cache(maxsize=16)
def _orderings(m: int) -> np.ndarray:
    return np.array(list(permutations(range(m))), dtype=np.int64)


def _report(check: str, tol: Tolerance, examined: int, witness: Optional[Witness], sampled: bool) -> CheckReport:
    if witness is not None:
        verdict = Verdict.FAIL
    else:
        verdict = Verdict.SAMPLED_PASS if sampled else Verdict.PASS
    return CheckReport(check=check, verdict=verdict, witness=witness, triples_examined=examined,
                       epsilon=tol.eps, tolerance_mode=tol.mode)


def _tuple_masks(tuples: np.ndarray) -> np.ndarray:
    return np.bitwise_or.reduce(np.left_shift(1, tuples), axis=1)


# ============================================================================
# Chain bound
# ============================================================================

def _chain_exhaustive(tau: SetFunction, D: np.ndarray, tol: Tolerance) -> Tuple[int, Optional[Tuple]]:
    examined = 0
    for mask in range(1, tau.universe.size):
        idx = np.array(mask_members(mask), dtype=np.int64)
        if idx.size < 2:
            continue
        chains = idx[_orderings(idx.size)]
        sums = D[chains[:, :-1], chains[:, 1:]].sum(axis=1)
        examined += chains.shape[0]
        j = int(np.argmin(sums))
        if tol.exceeds(tau.table[mask], sums[j]):
            return examined, (mask, chains[j], float(sums[j]))
    return examined, None


def _chain_sampled(tau: SetFunction, D: np.ndarray, tol: Tolerance, budget: int, seed: int,
                   progress: bool) -> Optional[Tuple]:
    n = tau.n
    rng = np.random.default_rng(seed)
    lengths = rng.integers(2, n + 1, size=budget)
    for m in tqdm(range(2, n + 1), desc="chain bound", disable=not progress, leave=False):
        count = int((lengths == m).sum())
        if count == 0:
            continue
        chains = np.argsort(rng.random((count, n)), axis=1)[:, :m]
        sums = D[chains[:, :-1], chains[:, 1:]].sum(axis=1)
        values = tau.table[_tuple_masks(chains)]
        bad = tol.exceeds(values, sums)
        if bad.any():
            j = int(np.flatnonzero(bad)[0])
            return int(_tuple_masks(chains[j:j + 1])[0]), chains[j], float(sums[j])
    return None


# ============================================================================
# Perturbation bound
# ============================================================================

def _perturbation_pairs_exhaustive(n: int):
    for m in range(1, n + 1):
        tuples = np.array(list(product(range(n), repeat=m)), dtype=np.int64)
        left = np.repeat(tuples, tuples.shape[0], axis=0)
        right = np.tile(tuples, (tuples.shape[0], 1))
        yield left, right


def _perturbation_pairs_sampled(n: int, budget: int, seed: int):
    rng = np.random.default_rng(seed)
    lengths = rng.integers(1, n + 1, size=budget)
    for m in range(1, n + 1):
        count = int((lengths == m).sum())
        if count:
            yield rng.integers(0, n, size=(count, m)), rng.integers(0, n, size=(count, m))


def _perturbation_violation(tau: SetFunction, D: np.ndarray, tol: Tolerance, left, right):
    lhs = np.abs(tau.table[_tuple_masks(left)] - tau.table[_tuple_masks(right)])
    rhs = D[left, right].sum(axis=1)
    bad = tol.exceeds(lhs, rhs)
    if bad.any():
        j = int(np.flatnonzero(bad)[0])
        return left[j], right[j], float(lhs[j]), float(rhs[j])
    return None


def verify_chain_bound(
    tau: SetFunction, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None
) -> CheckReport:
    """
    Check the chain bound and the perturbation bound with d = tau^2.

    Chains are enumerated exhaustively up to config.chain_exhaustive_max_n
    points, aligned tuples up to config.perturbation_exhaustive_max_n; above
    that config.lemma_sample_budget seeded draws are used.

    Raises:
        InputError: tau is not an extended metric
    """
    config, tol = resolve(config, tol)
    require_extended_metric(tau, tol, config)
    n = tau.n
    u = tau.universe
    D = tau_squared(tau).dist
    examined = 0

    chain_sampled = n > config.chain_exhaustive_max_n
    if chain_sampled:
        found = _chain_sampled(tau, D, tol, config.lemma_sample_budget, config.seed, config.show_progress)
        examined += config.lemma_sample_budget
    else:
        count, found = _chain_exhaustive(tau, D, tol)
        examined += count
    if found is not None:
        mask, chain, total = found
        witness = Witness(
            condition="chain", A=canonical_subset_key(mask, u), points=[u.names[i] for i in chain],
            lhs=float(tau.table[mask]), rhs=total, relation="<= sum")
        return _report("chain-bound", tol, examined, witness, chain_sampled)

    pert_sampled = n > config.perturbation_exhaustive_max_n
    if pert_sampled:
        batches = _perturbation_pairs_sampled(n, config.lemma_sample_budget, config.seed + 1)
    else:
        batches = _perturbation_pairs_exhaustive(n)
    for left, right in batches:
        examined += left.shape[0]
        found = _perturbation_violation(tau, D, tol, left, right)
        if found is not None:
            x, y, lhs, rhs = found
            witness = Witness(
                condition="perturbation",
                A=canonical_subset_key(int(_tuple_masks(x[None, :])[0]), u),
                B=canonical_subset_key(int(_tuple_masks(y[None, :])[0]), u),
                points=[u.names[i] for i in x] + [u.names[i] for i in y],
                lhs=lhs, rhs=rhs, relation="<= sum")
            return _report("chain-bound", tol, examined, witness, pert_sampled)

    logger.info("chain_bound_checked", n=n, examined=examined, sampled=chain_sampled or pert_sampled)
    return _report("chain-bound", tol, examined, None, chain_sampled or pert_sampled)


def verify_half_pair_bound(
    tau: SetFunction, tol: Optional[Tolerance] = None, config: Optional[BalkConfig] = None
) -> CheckReport:
    """
    Check tau(K) >= max_{x,y in K} tau^2(x, y) / 2 for every nonempty K.

    Raises:
        InputError: tau is not an extended metric
    """
    config, tol = resolve(config, tol)
    require_extended_metric(tau, tol, config)
    half = 0.5 * max_pair_table(tau_squared(tau).dist)
    bad = tol.exceeds(half[1:], tau.values)
    examined = tau.universe.size - 1
    if not bad.any():
        return _report("half-pair-bound", tol, examined, None, False)
    mask = int(np.flatnonzero(bad)[0]) + 1
    witness = Witness(condition="half-pair", A=canonical_subset_key(mask, tau.universe),
                      lhs=float(half[mask]), rhs=float(tau.table[mask]), relation="<=")
    return _report("half-pair-bound", tol, examined, witness, False)
