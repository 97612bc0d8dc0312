"""
Tau rules on the ambient and their lifts to pretangent spaces.

A TauRule evaluates tau(Im(x^1_m, ..., x^n_m)) for every m at once. The lift
X_tau(A) is the stable limit of tau(Im(representatives of A)) / r_m on the
selector's index set.
"""

from abc import ABC, abstractmethod
from itertools import combinations
from typing import Any, Callable, List, Optional, Sequence

import numpy as np
import structlog

from ..config import BalkConfig, CheckReport, Verdict, Witness
from ..core.bitsets import mask_members
from ..core.tables import SetFunction
from ..core.universe import parse_subset_key
from ..exceptions import InputError, PretangentError
from .scenario import AmbientSpace, LimitSelector, PointSequence, TabulatedSpace, TauRuleKind, TauRuleSpec
from .space import PretangentSpaceApprox
from .stability import converges_to_marked, rescaled_ratio, tail_estimate, vanishes

logger = structlog.get_logger()

EVIDENCE_NOTE = "numerical evidence on the supplied families: a failing family refutes, passing families do not prove"


def _pair_distances(space: AmbientSpace, columns: Sequence[np.ndarray]) -> List[np.ndarray]:
    return [space.distances(columns[i], columns[j]) for i, j in combinations(range(len(columns)), 2)]


def ambient_diameter(space: AmbientSpace, columns: Sequence[np.ndarray]) -> np.ndarray:
    """diam_d(Im(x^1_m, ..., x^n_m)) for every m."""
    if len(columns) < 2:
        return np.zeros(len(columns[0]))
    return np.max(_pair_distances(space, columns), axis=0)


def distinct_counts(space: AmbientSpace, columns: Sequence[np.ndarray]) -> np.ndarray:
    """|Im(x^1_m, ..., x^n_m)| for every m."""
    count = np.ones(len(columns[0]), dtype=np.int64)
    for i in range(1, len(columns)):
        repeated = np.zeros(len(columns[0]), dtype=bool)
        for j in range(i):
            repeated |= space.distances(columns[i], columns[j]) == 0
        count += ~repeated
    return count


class TauRule(ABC):
    """Set function on the finite subsets of the ambient."""

    name: str = "tau"

    @abstractmethod
    def evaluate(self, space: AmbientSpace, columns: Sequence[np.ndarray]) -> np.ndarray:
        """tau(Im(x^1_m, ..., x^n_m)) for every m."""
        pass


class DiameterRule(TauRule):
    """tau = diam_d."""

    name = "diameter"

    def evaluate(self, space: AmbientSpace, columns: Sequence[np.ndarray]) -> np.ndarray:
        return ambient_diameter(space, columns)


class PerturbedDiameterRule(TauRule):
    """
    tau(S) = diam_d(S) + c * max_{x in S} d(x, p)^e for |S| >= 3, diam_d(S)
    otherwise. Compatible with d for every c and e.
    """

    name = "diameter-perturbed"

    def __init__(self, c: float, e: float):
        if e <= 0:
            raise InputError(f"perturbation exponent must be positive, got {e}")
        self.c = c
        self.e = e

    def evaluate(self, space: AmbientSpace, columns: Sequence[np.ndarray]) -> np.ndarray:
        diam = ambient_diameter(space, columns)
        reach = np.max([space.to_marked(x) for x in columns], axis=0)
        bump = self.c * reach ** self.e
        return np.where(distinct_counts(space, columns) >= 3, diam + bump, diam)


class ExplicitRule(TauRule):
    """Tabulated set function over the points of a tabulated ambient."""

    name = "explicit"

    def __init__(self, tau: SetFunction):
        self.tau = tau

    def evaluate(self, space: AmbientSpace, columns: Sequence[np.ndarray]) -> np.ndarray:
        if not isinstance(space, TabulatedSpace) or space.universe != self.tau.universe:
            raise InputError("explicit tau rules need the tabulated ambient they are defined over")
        masks = np.bitwise_or.reduce(np.left_shift(1, np.stack(columns)), axis=0)
        return self.tau.table[masks]


class CallbackRule(TauRule):
    """tau given by a Python callable on the list of distinct points."""

    name = "callback"

    def __init__(self, fn: Callable[[List[Any]], float]):
        self.fn = fn

    def evaluate(self, space: AmbientSpace, columns: Sequence[np.ndarray]) -> np.ndarray:
        out = np.empty(len(columns[0]))
        for m in range(out.size):
            kept: List[int] = []
            for i, x in enumerate(columns):
                if all(space.distances(x[m:m + 1], columns[j][m:m + 1])[0] > 0 for j in kept):
                    kept.append(i)
            out[m] = self.fn([columns[i][m] for i in kept])
        return out


def tau_rule_from_spec(spec: Optional[TauRuleSpec], space: AmbientSpace) -> TauRule:
    """
    Build the rule a scenario or CLI flag names; None means the diameter.

    Raises:
        InputError: explicit values missing, partial or over a non-tabulated ambient
    """
    if spec is None or spec.kind == TauRuleKind.DIAMETER:
        return DiameterRule()
    if spec.kind == TauRuleKind.DIAMETER_PERTURBED:
        return PerturbedDiameterRule(spec.c, spec.e)
    if not isinstance(space, TabulatedSpace) or spec.values is None:
        raise InputError("explicit tau rule needs a tabulated ambient and values keyed by subset")
    universe = space.universe
    values = {parse_subset_key(key, universe): value for key, value in spec.values.items()}
    return ExplicitRule(SetFunction.from_mapping(universe, values))


def lift_balk(
    rule: TauRule,
    space: PretangentSpaceApprox,
    classes: Sequence[str],
    sel: Optional[LimitSelector] = None,
    tol: Optional[float] = None,
) -> float:
    """
    X_tau on a set of classes.

    Singletons lift to 0.

    Raises:
        InputError: classes is empty or names an unknown class
        PretangentError: the rescaled values have no stable limit
    """
    if not classes:
        raise InputError("lift needs a nonempty set of classes")
    sel = sel or space.selector
    tol = space.tol if tol is None else tol
    indices = sorted({space.class_index(label) for label in classes})
    if len(indices) == 1:
        return 0.0
    reps = [space.representatives[i] for i in indices]
    values = rule.evaluate(reps[0].space, [rep.points for rep in reps])
    verdict = tail_estimate(rescaled_ratio(values, space.r), sel, tol)
    if not verdict.stable:
        labels = [space.classes[i].label for i in indices]
        logger.error("lift_not_convergent", classes=labels, status=verdict.status.value)
        raise PretangentError(
            f"tau / r_m has no stable limit on {labels} ({verdict.status.value})",
            diagnostic={"classes": labels, "rule": rule.name, "verdict": verdict.model_dump(mode="json")},
        )
    return verdict.limit


def lift_set_function(
    rule: TauRule,
    space: PretangentSpaceApprox,
    sel: Optional[LimitSelector] = None,
    tol: Optional[float] = None,
) -> SetFunction:
    """X_tau on every nonempty set of classes, as a SetFunction over the classes."""
    universe = space.universe
    labels = space.labels
    values = [
        lift_balk(rule, space, [labels[i] for i in mask_members(mask)], sel, tol)
        for mask in range(1, universe.size)
    ]
    logger.info("lifted_set_function", rule=rule.name, classes=len(labels))
    return SetFunction(universe, values)


def _require_members(family: Sequence[PointSequence], config: BalkConfig) -> None:
    for seq in family:
        ok, reason = converges_to_marked(seq, config.envelope_ratio)
        if not ok:
            raise InputError(f"sequence {seq.label!r} does not converge to p: {reason}")


def generated_at_point(
    rule: TauRule,
    families: Sequence[Sequence[PointSequence]],
    sel: Optional[LimitSelector] = None,
    tol: float = 1e-6,
    config: Optional[BalkConfig] = None,
) -> CheckReport:
    """
    Test |tau - diam_d| / max_i d(x^i_m, p) -> 0 on each supplied family.

    The ratio is 0 wherever every point of the family sits at p.

    Raises:
        InputError: no families, an empty family, or a member that does not
            converge to p
    """
    config = config or BalkConfig()
    sel = sel or LimitSelector.ordinary()
    if not families:
        raise InputError("generated-at-point check needs at least one family")
    for index, family in enumerate(families):
        if not family:
            raise InputError(f"family {index} is empty")
        _require_members(family, config)
        space = family[0].space
        columns = [seq.points for seq in family]
        gap = np.abs(rule.evaluate(space, columns) - ambient_diameter(space, columns))
        reach = np.max([space.to_marked(x) for x in columns], axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(reach > 0, gap / reach, 0.0)
        passed, estimate = vanishes(ratio, sel, tol, config.settling_ratio)
        if not passed:
            witness = Witness(
                condition="vanishing-ratio",
                points=[seq.label for seq in family],
                lhs=estimate,
                rhs=0.0,
                relation="-> 0",
            )
            logger.info("generated_at_point_refuted", rule=rule.name, family=witness.points, estimate=estimate)
            return CheckReport(
                check="generated-at-point",
                verdict=Verdict.FAIL,
                witness=witness,
                triples_examined=index + 1,
                epsilon=tol,
                notes=[EVIDENCE_NOTE],
            )
    return CheckReport(
        check="generated-at-point",
        verdict=Verdict.PASS,
        triples_examined=len(families),
        epsilon=tol,
        notes=[EVIDENCE_NOTE],
    )
