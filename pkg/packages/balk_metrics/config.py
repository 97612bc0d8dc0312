"""
Configuration and report models for balk_metrics.

Handles environment variables and defines the report structures returned
by checkers and theorem oracles.
"""

import os
from enum import Enum
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .core.tolerance import Tolerance, ToleranceMode

load_dotenv()


class Verdict(str, Enum):
    """Outcome of a check."""
    PASS = "pass"
    FAIL = "fail"
    SAMPLED_PASS = "sampled-pass"


class Witness(BaseModel):
    """Concrete violating tuple with both sides of the violated relation."""

    model_config = ConfigDict(populate_by_name=True)

    condition: str = Field(..., description="Which axiom or clause is violated")
    set_a: Optional[str] = Field(None, alias="A", description="Canonical key of A")
    set_b: Optional[str] = Field(None, alias="B", description="Canonical key of B")
    set_c: Optional[str] = Field(None, alias="C", description="Canonical key of C")
    points: Optional[List[str]] = Field(None, description="Violating point labels, in relation order")
    lhs: float = Field(..., description="Left side of the relation")
    rhs: float = Field(..., description="Right side of the relation")
    relation: str = Field(..., description="Relation that should hold: '<=', '==', '>'")
    tolerance_boundary: bool = Field(
        default=False,
        description="True when the value lies in (0, eps]: positive but not separable from zero"
    )


class CheckReport(BaseModel):
    """Pass/fail verdict of a checker plus a witness on failure."""

    check: str = Field(..., description="Checker name")
    verdict: Verdict = Field(..., description="pass, fail or sampled-pass")
    witness: Optional[Witness] = Field(None, description="Present iff verdict is fail")
    triples_examined: int = Field(default=0, ge=0, description="Enumerated instances")
    epsilon: float = Field(..., ge=0, description="Tolerance eps used")
    tolerance_mode: ToleranceMode = Field(default=ToleranceMode.RELATIVE)
    notes: List[str] = Field(default_factory=list, description="Structural or provenance remarks")

    @property
    def passed(self) -> bool:
        return self.verdict != Verdict.FAIL

    def renamed(self, check: str) -> "CheckReport":
        return self.model_copy(update={"check": check})


class ConstructionResult(BaseModel):
    """Table built by a construction, with the checks that qualify it."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    table: Any = Field(..., description="SetFunction, FiniteMetric or GMetricTable")
    precondition: CheckReport = Field(..., description="Check of the input the guarantee rests on")
    check: Optional[CheckReport] = Field(None, description="Check of the output; present iff the precondition failed")

    @property
    def guaranteed(self) -> bool:
        return self.precondition.passed

    @property
    def passed(self) -> bool:
        return self.guaranteed or (self.check is not None and self.check.passed)


class ClauseVerdict(BaseModel):
    """Verdict of one clause of an equivalence."""

    id: str = Field(..., description="Clause label, e.g. 'i'")
    verdict: Verdict
    detail: Optional[str] = Field(None, description="First failing subset or sub-check")


class EquivalenceReport(BaseModel):
    """Clause-by-clause evaluation of an equivalence statement."""

    theorem: str = Field(..., description="Equivalence identifier")
    k: Optional[int] = Field(None, description="Arity parameter, when the statement has one")
    clauses: List[ClauseVerdict]
    agree: bool = Field(..., description="True iff all clause verdicts are identical")
    disagreement_witness: Optional[Dict[str, Any]] = None
    notes: List[str] = Field(default_factory=list)


class BalkConfig(BaseModel):
    """Configuration for checkers, constructions and pretangent estimates."""

    # Comparison
    epsilon: float = Field(default=1e-9, ge=0, description="Comparison margin")
    tolerance_mode: ToleranceMode = Field(default=ToleranceMode.RELATIVE, description="Margin scaling")

    # Enumeration limits
    exhaustive_max_n: int = Field(
        default=10,
        description="Largest universe on which triple inequalities are enumerated exhaustively"
    )
    sample_budget: int = Field(default=10_000_000, description="Sampled triples above the exhaustive cap")
    seed: int = Field(default=0, description="Seed for every sampled check and generator")
    witness_search_rounds: int = Field(default=64, description="Bound on witness shrinking steps")

    # Inequality oracles
    chain_exhaustive_max_n: int = Field(default=6, description="Exhaustive chain bound up to this size")
    perturbation_exhaustive_max_n: int = Field(default=4, description="Exhaustive perturbation bound up to this size")
    lemma_sample_budget: int = Field(default=100_000, description="Sampled tuples above the exhaustive caps")
    oracle_max_n: int = Field(default=12, description="Largest universe the equivalence oracles accept")

    # Pretangent estimates
    pretangent_prefix: int = Field(default=10_000, description="Default sequence prefix length M")
    pretangent_tolerance: float = Field(default=1e-6, gt=0, description="Tolerance for limits")
    envelope_ratio: float = Field(
        default=0.5,
        gt=0, lt=1,
        description="Tail max of d(x_m, p) over the last half must stay below this fraction of the head max"
    )
    settling_ratio: float = Field(
        default=0.9,
        gt=0, lt=1,
        description="Largest per-doubling shrink factor of tail increments accepted for extrapolation"
    )
    oracle_spot_checks: int = Field(default=256, description="Sampled triples for oracle ambient spaces")

    show_progress: bool = Field(default=False, description="Show tqdm progress bars on long sweeps")

    @field_validator("exhaustive_max_n", "chain_exhaustive_max_n", "perturbation_exhaustive_max_n", "oracle_max_n")
    @classmethod
    def validate_caps(cls, v: int) -> int:
        if not 1 <= v <= 24:
            raise ValueError(f"enumeration caps must be between 1 and 24, got {v}")
        return v

    @field_validator("sample_budget", "lemma_sample_budget", "pretangent_prefix", "witness_search_rounds")
    @classmethod
    def validate_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"must be positive, got {v}")
        return v

    def tolerance(self) -> Tolerance:
        """Tolerance for axiom checks."""
        return Tolerance(eps=self.epsilon, mode=self.tolerance_mode)

    def limit_tolerance(self) -> Tolerance:
        """Tolerance for pretangent limits."""
        return Tolerance(eps=self.pretangent_tolerance, mode=ToleranceMode.RELATIVE)

    @classmethod
    def from_env(cls) -> "BalkConfig":
        """Load configuration from environment variables."""
        env = {
            "epsilon": os.getenv("BALK_EPSILON"),
            "tolerance_mode": os.getenv("BALK_TOLERANCE_MODE"),
            "exhaustive_max_n": os.getenv("BALK_EXHAUSTIVE_MAX_N"),
            "sample_budget": os.getenv("BALK_SAMPLE_BUDGET"),
            "seed": os.getenv("BALK_SEED"),
            "pretangent_prefix": os.getenv("BALK_PRETANGENT_PREFIX"),
            "pretangent_tolerance": os.getenv("BALK_PRETANGENT_TOLERANCE"),
        }
        return cls(**{key: value for key, value in env.items() if value})


def resolve(config: Optional[BalkConfig], tol: Optional[Tolerance]) -> tuple:
    """Fill in default config and tolerance."""
    config = config or BalkConfig()
    return config, tol or config.tolerance()
