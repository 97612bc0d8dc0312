"""
Infinitesimal ultrametricity criterion.

For a triple (x, y, z) near p:

    F(x, y)   = d(x, y) * min(d(x,p), d(y,p)) / max(d(x,p), d(y,p))^2, F(p, p) = 0
    Phi       = max(F(x, y), F(x, z), F(y, z))
    d1, d2    = largest and second largest side, d1/d2 := 1 when d2 = 0

Every pretangent space at p is ultrametric iff Phi * (d1/d2 - 1) -> 0 as
x, y, z -> p. Supplied triples can refute this, never prove it.
"""

from typing import Optional, Sequence, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, Field

from ..config import BalkConfig, CheckReport, Verdict, Witness
from ..exceptions import InputError
from .lifting import EVIDENCE_NOTE, TauRule, generated_at_point
from .scenario import AmbientSpace, LimitSelector, PointSequence
from .stability import converges_to_marked, vanishes

logger = structlog.get_logger()

Triple = Tuple[PointSequence, PointSequence, PointSequence]


def pair_weight(dxy: np.ndarray, dxp: np.ndarray, dyp: np.ndarray) -> np.ndarray:
    """F(x, y) for every m."""
    near = np.minimum(dxp, dyp)
    far = np.maximum(dxp, dyp)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(far > 0, dxy * near / far ** 2, 0.0)


def criterion_product(space: AmbientSpace, x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Phi(x_m, y_m, z_m) * (d1/d2 - 1) for every m."""
    dxy, dxz, dyz = space.distances(x, y), space.distances(x, z), space.distances(y, z)
    dxp, dyp, dzp = space.to_marked(x), space.to_marked(y), space.to_marked(z)
    phi = np.maximum.reduce([pair_weight(dxy, dxp, dyp), pair_weight(dxz, dxp, dzp), pair_weight(dyz, dyp, dzp)])
    sides = np.sort(np.stack([dxy, dxz, dyz]), axis=0)
    d1, d2 = sides[2], sides[1]
    with np.errstate(divide="ignore", invalid="ignore"):
        excess = np.where(d2 > 0, d1 / d2 - 1.0, 0.0)
    return phi * excess


def ultrametric_criterion(
    space: AmbientSpace,
    triple_families: Sequence[Triple],
    sel: Optional[LimitSelector] = None,
    tol: float = 1e-6,
    config: Optional[BalkConfig] = None,
) -> CheckReport:
    """
    Tail test of Phi * (d1/d2 - 1) -> 0 on each supplied triple of sequences.

    Raises:
        InputError: no triples, a member outside the ambient, or a member
            that does not converge to p
    """
    config = config or BalkConfig()
    sel = sel or LimitSelector.ordinary()
    if not triple_families:
        raise InputError("ultrametric criterion needs at least one triple of sequences")
    for index, triple in enumerate(triple_families):
        for seq in triple:
            if seq.space is not space:
                raise InputError(f"sequence {seq.label!r} lives in a different ambient")
            ok, reason = converges_to_marked(seq, config.envelope_ratio)
            if not ok:
                raise InputError(f"sequence {seq.label!r} does not converge to p: {reason}")
        x, y, z = (seq.points for seq in triple)
        passed, estimate = vanishes(criterion_product(space, x, y, z), sel, tol, config.settling_ratio)
        if not passed:
            witness = Witness(
                condition="ultrametric-product",
                points=[seq.label for seq in triple],
                lhs=estimate,
                rhs=0.0,
                relation="-> 0",
            )
            logger.info("ultrametric_criterion_refuted", triple=witness.points, estimate=estimate)
            return CheckReport(
                check="ultrametric-criterion",
                verdict=Verdict.FAIL,
                witness=witness,
                triples_examined=index + 1,
                epsilon=tol,
                notes=[EVIDENCE_NOTE],
            )
    return CheckReport(
        check="ultrametric-criterion",
        verdict=Verdict.PASS,
        triples_examined=len(triple_families),
        epsilon=tol,
        notes=[EVIDENCE_NOTE],
    )


class UltrametricGenerationReport(BaseModel):
    """Whether the scenario is consistent with every lift being generated by an ultrametric."""

    generated: CheckReport
    ultrametric: CheckReport
    conclusion: str = Field(..., description="'consistent' or 'refuted'")

    @property
    def passed(self) -> bool:
        return self.conclusion == "consistent"


def ultrametric_generation_report(
    rule: TauRule,
    families: Sequence[Sequence[PointSequence]],
    triple_families: Sequence[Triple],
    sel: Optional[LimitSelector] = None,
    tol: float = 1e-6,
    config: Optional[BalkConfig] = None,
) -> UltrametricGenerationReport:
    """
    Pair the generated-at-point check of rule with the ultrametric criterion.

    Both must pass on the supplied families for the scenario to be consistent
    with every lifted metric being generated by an ultrametric.
    """
    if not triple_families:
        raise InputError("ultrametric criterion needs at least one triple of sequences")
    generated = generated_at_point(rule, families, sel, tol, config)
    ultra = ultrametric_criterion(triple_families[0][0].space, triple_families, sel, tol, config)
    conclusion = "consistent" if generated.passed and ultra.passed else "refuted"
    logger.info("ultrametric_generation_checked", rule=rule.name, conclusion=conclusion)
    return UltrametricGenerationReport(generated=generated, ultrametric=ultra, conclusion=conclusion)
