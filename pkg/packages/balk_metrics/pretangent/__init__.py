"""Pretangent spaces at a marked point and the lifted extended metrics on them."""

from .lifting import (
    CallbackRule,
    DiameterRule,
    ExplicitRule,
    PerturbedDiameterRule,
    TauRule,
    generated_at_point,
    lift_balk,
    lift_set_function,
    tau_rule_from_spec,
)
from .pipeline import PretangentPipeline
from .scenario import (
    AmbientSpace,
    EuclideanSpace,
    LimitSelector,
    NormalizingSequence,
    OracleSpace,
    PointSequence,
    PretangentScenario,
    TabulatedSpace,
    TauRuleSpec,
)
from .space import PretangentSpaceApprox, build_self_stable, quotient
from .stability import StabilityStatus, StabilityVerdict, mutual_stability
from .ultrametric import UltrametricGenerationReport, ultrametric_criterion, ultrametric_generation_report

__all__ = [
    "CallbackRule",
    "DiameterRule",
    "ExplicitRule",
    "PerturbedDiameterRule",
    "TauRule",
    "generated_at_point",
    "lift_balk",
    "lift_set_function",
    "tau_rule_from_spec",
    "PretangentPipeline",
    "AmbientSpace",
    "EuclideanSpace",
    "LimitSelector",
    "NormalizingSequence",
    "OracleSpace",
    "PointSequence",
    "PretangentScenario",
    "TabulatedSpace",
    "TauRuleSpec",
    "PretangentSpaceApprox",
    "build_self_stable",
    "quotient",
    "StabilityStatus",
    "StabilityVerdict",
    "mutual_stability",
    "UltrametricGenerationReport",
    "ultrametric_criterion",
    "ultrametric_generation_report",
]
