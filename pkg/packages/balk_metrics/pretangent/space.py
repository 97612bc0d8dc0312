"""
Self-stable families and their metric quotients.

build_self_stable makes one greedy pass over the pool (after p~), admitting
a sequence iff it is mutually stable with everything admitted so far.
quotient groups the family by single linkage over d~ <= tol and validates
the grouping before reporting rho.
"""

from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, Field
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ..axioms.metrics import check_metric
from ..config import BalkConfig
from ..core.tables import FiniteMetric
from ..core.tolerance import Tolerance
from ..core.universe import Universe
from ..exceptions import InputError, PretangentError
from .scenario import MARKED_LABEL, LimitSelector, NormalizingSequence, PointSequence
from .stability import StabilityStatus, StabilityVerdict, converges_to_marked, mutual_stability

logger = structlog.get_logger()


class RejectedSequence(BaseModel):
    """Pool entry left out of the family."""

    label: str
    reason: str


class PairVerdict(BaseModel):
    """Stability verdict of one pair of family members."""

    x: str
    y: str
    verdict: StabilityVerdict


class PretangentClass(BaseModel):
    """Equivalence class of family members at rescaled distance zero."""

    label: str = Field(..., description="Label of the representative")
    members: List[str]
    representative: str


class PretangentSpaceReport(BaseModel):
    """Serializable summary of a PretangentSpaceApprox."""

    classes: List[PretangentClass]
    rho: List[List[float]]
    verdicts: List[PairVerdict]
    rejected: List[RejectedSequence] = Field(default_factory=list)
    provenance: Dict[str, Any] = Field(default_factory=dict)


class PretangentSpaceApprox:
    """
    Finite pretangent space: classes, representatives and the metric rho.

    Args:
        classes: Classes in family order of their representatives
        representatives: One PointSequence per class
        rho: Symmetric class distance matrix
        r: Normalizing sequence the limits were taken against
        selector: Limit selector used for every estimate
        tol: Limit tolerance
    """

    def __init__(
        self,
        classes: List[PretangentClass],
        representatives: List[PointSequence],
        rho: np.ndarray,
        r: NormalizingSequence,
        selector: LimitSelector,
        tol: float,
        verdicts: Optional[List[PairVerdict]] = None,
        rejected: Optional[List[RejectedSequence]] = None,
    ):
        self.classes = classes
        self.representatives = representatives
        self.rho = rho
        self.r = r
        self.selector = selector
        self.tol = tol
        self.verdicts = verdicts or []
        self.rejected = rejected or []

    @property
    def size(self) -> int:
        return len(self.classes)

    @property
    def labels(self) -> List[str]:
        return [c.label for c in self.classes]

    @property
    def universe(self) -> Universe:
        """Universe whose points are the classes."""
        return Universe.from_labels(self.labels)

    def class_index(self, label: str) -> int:
        for i, cls in enumerate(self.classes):
            if label == cls.label or label in cls.members:
                return i
        raise InputError(f"unknown class {label!r}; classes are {self.labels}")

    def as_metric(self) -> FiniteMetric:
        return FiniteMetric(self.universe, self.rho)

    def report(self) -> PretangentSpaceReport:
        space = self.representatives[0].space
        return PretangentSpaceReport(
            classes=self.classes,
            rho=self.rho.tolist(),
            verdicts=self.verdicts,
            rejected=self.rejected,
            provenance={
                "ambient": space.describe(),
                "M": self.r.prefix,
                "normalizing": self.r.form,
                "selector": self.selector.describe(),
                "tolerance": self.tol,
            },
        )


def _abort(message: str, **diagnostic) -> PretangentError:
    logger.error("pretangent_aborted", reason=message, **diagnostic)
    return PretangentError(message, diagnostic={"reason": message, **diagnostic})


def build_self_stable(
    pool: Sequence[PointSequence],
    r: NormalizingSequence,
    sel: LimitSelector,
    tol: float,
    config: Optional[BalkConfig] = None,
) -> Tuple[List[PointSequence], List[RejectedSequence]]:
    """
    Greedy maximal self-stable family within the pool.

    p~ is inserted first. A pool entry that does not converge to p, or that
    is unstable with an admitted member, is rejected with a reason.

    Raises:
        InputError: the pool is empty
        PretangentError: a stability verdict is inconclusive
    """
    if not pool:
        raise InputError("pool must contain at least one sequence")
    config = config or BalkConfig()
    space = pool[0].space
    family = [PointSequence.marked(space, r.prefix)]
    rejected: List[RejectedSequence] = []

    for seq in pool:
        ok, reason = converges_to_marked(seq, config.envelope_ratio)
        if not ok:
            logger.warning("sequence_rejected", label=seq.label, reason=reason)
            rejected.append(RejectedSequence(label=seq.label, reason=reason))
            continue
        blocker = None
        for member in family:
            verdict = mutual_stability(seq, member, r, sel, tol, config.settling_ratio)
            if verdict.status == StabilityStatus.INCONCLUSIVE:
                raise _abort(
                    f"stability of {seq.label!r} and {member.label!r} is inconclusive",
                    pair=[seq.label, member.label],
                    tail_spread=verdict.tail_spread,
                    tolerance=tol,
                )
            if verdict.status == StabilityStatus.UNSTABLE:
                blocker = member.label
                break
        if blocker is None:
            family.append(seq)
        else:
            reason = f"not mutually stable with {blocker!r}"
            logger.warning("sequence_rejected", label=seq.label, reason=reason)
            rejected.append(RejectedSequence(label=seq.label, reason=reason))

    logger.info("self_stable_family_built", admitted=len(family), rejected=len(rejected))
    return family, rejected


def _pairwise_limits(
    family: Sequence[PointSequence], r: NormalizingSequence, sel: LimitSelector, tol: float
) -> Tuple[np.ndarray, List[PairVerdict]]:
    size = len(family)
    limits = np.zeros((size, size))
    verdicts: List[PairVerdict] = []
    for i, j in combinations(range(size), 2):
        verdict = mutual_stability(family[i], family[j], r, sel, tol)
        if not verdict.stable:
            raise _abort(
                f"family is not self-stable: {family[i].label!r} and {family[j].label!r} are {verdict.status.value}",
                pair=[family[i].label, family[j].label],
                tail_spread=verdict.tail_spread,
            )
        limits[i, j] = limits[j, i] = verdict.limit
        verdicts.append(PairVerdict(x=family[i].label, y=family[j].label, verdict=verdict))
    return limits, verdicts


def quotient(
    family: Sequence[PointSequence],
    r: NormalizingSequence,
    sel: LimitSelector,
    tol: float,
    rejected: Optional[List[RejectedSequence]] = None,
) -> PretangentSpaceApprox:
    """
    Metric quotient of a self-stable family by d~ = 0.

    Classes are the connected components of the graph d~ <= tol. The
    grouping is accepted only when members of one class are within 3*tol of
    each other, distinct classes are more than 10*tol apart and rho does not
    move by more than 3*tol when other representatives are chosen.

    Raises:
        InputError: the family is empty
        PretangentError: the family is not self-stable, the grouping
            straddles the tolerance, or rho fails the metric check
    """
    if not family:
        raise InputError("family must contain at least one sequence")
    limits, verdicts = _pairwise_limits(family, r, sel, tol)
    adjacency = csr_matrix(limits <= tol)
    count, component = connected_components(adjacency, directed=False)

    order: List[int] = []
    for c in component:
        if int(c) not in order:
            order.append(int(c))
    groups = [np.flatnonzero(component == c) for c in order]

    for members in groups:
        spread = limits[np.ix_(members, members)].max()
        if spread > 3 * tol:
            raise _abort(
                "class members are not within 3*tol of each other",
                members=[family[i].label for i in members],
                max_distance=float(spread),
            )

    reps = np.array([members[0] for members in groups])
    rho = limits[np.ix_(reps, reps)]
    for a, b in combinations(range(count), 2):
        block = limits[np.ix_(groups[a], groups[b])]
        if rho[a, b] <= 10 * tol:
            raise _abort(
                "distinct classes are within 10*tol",
                classes=[family[reps[a]].label, family[reps[b]].label],
                rho=float(rho[a, b]),
            )
        drift = float(np.abs(block - rho[a, b]).max())
        if drift > 3 * tol:
            raise _abort(
                "rho depends on the choice of representatives",
                classes=[family[reps[a]].label, family[reps[b]].label],
                drift=drift,
            )

    classes = [
        PretangentClass(
            label=family[members[0]].label,
            members=[family[i].label for i in members],
            representative=family[members[0]].label,
        )
        for members in groups
    ]
    space = PretangentSpaceApprox(
        classes=classes,
        representatives=[family[i] for i in reps],
        rho=rho,
        r=r,
        selector=sel,
        tol=tol,
        verdicts=verdicts,
        rejected=rejected,
    )

    report = check_metric(space.as_metric(), Tolerance(eps=10 * tol))
    if not report.passed:
        raise _abort("rho is not a metric", witness=report.witness.model_dump(by_alias=True, exclude_none=True))
    logger.info("pretangent_space_built", classes=count, members=len(family))
    return space


def is_single_point(space: PretangentSpaceApprox) -> bool:
    """True when every admitted sequence collapsed onto the class of p~."""
    return space.size == 1 and space.classes[0].label == MARKED_LABEL
