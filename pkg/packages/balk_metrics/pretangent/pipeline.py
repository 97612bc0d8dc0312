"""
Pretangent pipeline orchestrator.

Materializes a scenario once and runs the family build, quotient, lifting
and criterion steps against it.
"""

from typing import Dict, List, Optional, Sequence

import structlog

from ..config import BalkConfig, CheckReport
from ..core.tables import SetFunction
from ..exceptions import InputError
from .lifting import TauRule, generated_at_point, lift_balk, lift_set_function, tau_rule_from_spec
from .scenario import (
    AmbientSpace,
    LimitSelector,
    NormalizingSequence,
    OracleSpace,
    PointSequence,
    PretangentScenario,
    TauRuleSpec,
    ambient_from_spec,
)
from .space import PretangentSpaceApprox, build_self_stable, is_single_point, quotient
from .ultrametric import Triple, UltrametricGenerationReport, ultrametric_criterion, ultrametric_generation_report

logger = structlog.get_logger()


class PretangentPipeline:
    """
    Complete pretangent computation for one scenario.

    Orchestrates:
    - ambient, normalizing sequence, selector and pool materialization
    - greedy self-stable family and quotient
    - lifting of a tau rule to the classes
    - generated-at-point and ultrametric criteria on the declared families
    """

    def __init__(
        self,
        scenario: PretangentScenario,
        config: Optional[BalkConfig] = None,
        ambient: Optional[AmbientSpace] = None,
    ) -> None:
        """
        Materialize a scenario.

        Args:
            scenario: Parsed scenario document
            config: BalkConfig object, uses defaults if not provided
            ambient: Replaces scenario.ambient, e.g. with an OracleSpace

        Raises:
            InputError: the scenario does not describe a valid ambient, sequence or selector
        """
        self.config = config or BalkConfig.from_env()
        self.scenario = scenario
        self.tol = scenario.tolerance or self.config.pretangent_tolerance
        self.ambient = ambient or ambient_from_spec(scenario.ambient)
        self.r = NormalizingSequence.from_spec(scenario.normalizing, scenario.prefix or self.config.pretangent_prefix)
        self.selector = LimitSelector.from_spec(scenario.selector)
        self.selector.indices(self.r.prefix)
        self.pool = [PointSequence.from_spec(spec, self.ambient, self.r) for spec in scenario.sequences]
        self._by_label: Dict[str, PointSequence] = {seq.label: seq for seq in self.pool}
        self._space: Optional[PretangentSpaceApprox] = None

        if isinstance(self.ambient, OracleSpace):
            self.ambient.spot_check(self.pool, self.config.oracle_spot_checks, self.config.seed, self.config.tolerance())

        logger.info(
            "pretangent_pipeline_initialized",
            ambient=self.ambient.kind,
            M=self.r.prefix,
            sequences=len(self.pool),
            selector=self.selector.describe(),
        )

    def sequence(self, label: str) -> PointSequence:
        try:
            return self._by_label[label]
        except KeyError:
            raise InputError(f"scenario has no sequence labelled {label!r}") from None

    def rule(self, spec: Optional[TauRuleSpec] = None) -> TauRule:
        """Rule from spec, else the scenario's rule, else the diameter."""
        return tau_rule_from_spec(spec or self.scenario.tau_rule, self.ambient)

    def build(self) -> PretangentSpaceApprox:
        """Family build and quotient; cached for later lifts."""
        if self._space is None:
            if self.pool:
                family, rejected = build_self_stable(self.pool, self.r, self.selector, self.tol, self.config)
            else:
                family, rejected = [PointSequence.marked(self.ambient, self.r.prefix)], []
            self._space = quotient(family, self.r, self.selector, self.tol, rejected)
            if is_single_point(self._space):
                logger.info("pretangent_space_single_point")
        return self._space

    def lift(self, classes: Sequence[str], rule: Optional[TauRule] = None) -> float:
        """X_tau on the named classes; an empty selection means every class."""
        space = self.build()
        return lift_balk(rule or self.rule(), space, list(classes) or space.labels)

    def lift_all(self, rule: Optional[TauRule] = None) -> SetFunction:
        return lift_set_function(rule or self.rule(), self.build())

    def families(self) -> List[List[PointSequence]]:
        """Declared families, or the whole pool as one family."""
        if self.scenario.families:
            return [[self.sequence(label) for label in family] for family in self.scenario.families]
        if not self.pool:
            raise InputError("scenario has no sequences to form a family")
        return [list(self.pool)]

    def triples(self) -> List[Triple]:
        if not self.scenario.triples:
            raise InputError("scenario declares no triples")
        return [tuple(self.sequence(label) for label in triple) for triple in self.scenario.triples]

    def generated(self, rule: Optional[TauRule] = None) -> CheckReport:
        return generated_at_point(rule or self.rule(), self.families(), self.selector, self.tol, self.config)

    def ultra_criterion(self) -> CheckReport:
        return ultrametric_criterion(self.ambient, self.triples(), self.selector, self.tol, self.config)

    def ultrametric_generation(self, rule: Optional[TauRule] = None) -> UltrametricGenerationReport:
        return ultrametric_generation_report(
            rule or self.rule(), self.families(), self.triples(), self.selector, self.tol, self.config
        )
