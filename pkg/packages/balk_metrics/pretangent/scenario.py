"""
Scenario files and their materialized counterparts.

A scenario fixes an ambient space with a marked point p, a normalizing
sequence r_1..r_M, a limit selector and a pool of point sequences, all
truncated to a common prefix of length M. The pydantic *Spec models mirror
the JSON file; AmbientSpace, NormalizingSequence, LimitSelector and
PointSequence are the numpy-backed objects the computations run on.

Usage:
    scenario = PretangentScenario.model_validate(document)
    space = ambient_from_spec(scenario.ambient)
    r = NormalizingSequence.from_spec(scenario.normalizing, scenario.prefix or 10_000)
    pool = [PointSequence.from_spec(s, space, r) for s in scenario.sequences]
"""

from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..axioms.metrics import check_metric
from ..core.tables import FiniteMetric
from ..core.tolerance import Tolerance
from ..core.universe import Universe
from ..exceptions import InputError

logger = structlog.get_logger()

MARKED_LABEL = "~p"


# ============================================================================
# File models
# ============================================================================

class AmbientKind(str, Enum):
    """Ambient spaces a scenario file can declare."""
    EUCLIDEAN = "euclidean"
    TABULATED = "tabulated"


class AmbientSpec(BaseModel):
    """Ambient metric space with its marked point."""

    model_config = ConfigDict(extra="forbid")

    kind: AmbientKind
    dim: Optional[int] = Field(None, ge=1, description="Dimension of the euclidean ambient")
    p: Union[List[float], str] = Field(..., description="Marked point: coordinates or a tabulated label")
    labels: Optional[List[str]] = Field(None, description="Point labels of a tabulated ambient")
    dist: Optional[List[List[float]]] = Field(None, description="Distance matrix of a tabulated ambient")


class NormalizingForm(str, Enum):
    POWER = "power"
    GEOMETRIC = "geometric"
    TABULATED = "tabulated"


class NormalizingSpec(BaseModel):
    """r_m = c*m^(-a), r_m = c*q^m, or explicit values."""

    model_config = ConfigDict(extra="forbid")

    form: NormalizingForm
    c: float = Field(default=1.0, gt=0)
    a: Optional[float] = Field(None, gt=0)
    q: Optional[float] = Field(None, gt=0, lt=1)
    values: Optional[List[float]] = None


class SelectorMode(str, Enum):
    ORDINARY = "ordinary"
    SUBSEQUENCE = "subsequence"


class SelectorSpec(BaseModel):
    """Index pattern standing in for an ultrafilter: all m, or m = start (mod step)."""

    model_config = ConfigDict(extra="forbid")

    mode: SelectorMode = SelectorMode.ORDINARY
    start: int = Field(default=0, ge=0)
    step: int = Field(default=1, ge=1)


class SequenceForm(str, Enum):
    CONSTANT = "constant"
    LINEAR = "linear"
    ANALYTIC = "analytic"
    POWER = "power"
    ALTERNATING = "alternating"
    TABULATED = "tabulated"


class SequenceSpec(BaseModel):
    """One point sequence of the pool, by closed form or by table."""

    model_config = ConfigDict(extra="forbid")

    label: str
    form: SequenceForm
    v: Optional[List[float]] = Field(None, description="Leading direction")
    w: Optional[List[float]] = Field(None, description="Correction or odd-index direction")
    alpha: Optional[float] = Field(None, gt=1, description="Correction exponent of the analytic form")
    beta: Optional[float] = Field(None, gt=0, description="Exponent of the power form")
    points: Optional[List[Any]] = Field(None, description="Coordinates or labels, one per index m")

    @field_validator("label")
    @classmethod
    def validate_label(cls, v: str) -> str:
        if not v or "," in v:
            raise ValueError(f"sequence label {v!r} must be nonempty and comma free")
        if v == MARKED_LABEL:
            raise ValueError(f"{MARKED_LABEL!r} is reserved for the constant sequence at p")
        return v


class TauRuleKind(str, Enum):
    DIAMETER = "diameter"
    EXPLICIT = "explicit"
    DIAMETER_PERTURBED = "diameter-perturbed"


class TauRuleSpec(BaseModel):
    """Set function on the ambient used for lifting."""

    model_config = ConfigDict(extra="forbid")

    kind: TauRuleKind = TauRuleKind.DIAMETER
    c: float = Field(default=1.0, description="Coefficient of the diameter perturbation")
    e: float = Field(default=1.0, gt=0, description="Exponent of the diameter perturbation")
    values: Optional[Dict[str, float]] = Field(None, description="Explicit values keyed by subset key")


class PretangentScenario(BaseModel):
    """Complete scenario document."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    ambient: AmbientSpec
    normalizing: NormalizingSpec
    prefix: Optional[int] = Field(None, ge=8, alias="M", description="Prefix length M; config default when absent")
    selector: SelectorSpec = Field(default_factory=SelectorSpec)
    sequences: List[SequenceSpec] = Field(default_factory=list)
    tolerance: Optional[float] = Field(None, gt=0, description="Limit tolerance; config default when absent")
    families: Optional[List[List[str]]] = Field(
        None, description="Sequence families for the generated-at-point check"
    )
    triples: Optional[List[List[str]]] = Field(None, description="Sequence triples for the ultrametric criterion")
    tau_rule: Optional[TauRuleSpec] = None

    @field_validator("sequences")
    @classmethod
    def validate_unique_labels(cls, v: List[SequenceSpec]) -> List[SequenceSpec]:
        labels = [s.label for s in v]
        if len(set(labels)) != len(labels):
            raise ValueError("sequence labels must be pairwise distinct")
        return v

    @field_validator("triples")
    @classmethod
    def validate_triples(cls, v: Optional[List[List[str]]]) -> Optional[List[List[str]]]:
        for triple in v or []:
            if len(triple) != 3:
                raise ValueError(f"triple {triple} must name exactly three sequences")
        return v


# ============================================================================
# Ambient spaces
# ============================================================================

class AmbientSpace(ABC):
    """
    Metric space with a marked point, evaluated on whole sequence prefixes.

    Points of a prefix are stored as one numpy array whose first axis is m.
    """

    @property
    @abstractmethod
    def kind(self) -> str:
        """Ambient kind name."""
        pass

    @abstractmethod
    def distances(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """d(x_m, y_m) for every m."""
        pass

    @abstractmethod
    def constant(self, prefix: int) -> np.ndarray:
        """The prefix of the constant sequence at p."""
        pass

    @abstractmethod
    def coerce_points(self, points: Sequence[Any], label: str) -> np.ndarray:
        """Validate tabulated points and convert them to the internal array form."""
        pass

    def to_marked(self, xs: np.ndarray) -> np.ndarray:
        """d(x_m, p) for every m."""
        return self.distances(xs, self.constant(len(xs)))

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind}


class EuclideanSpace(AmbientSpace):
    """R^dim with the Euclidean norm."""

    def __init__(self, p: Sequence[float]):
        p = np.asarray(p, dtype=float)
        if p.ndim != 1 or p.size == 0 or not np.all(np.isfinite(p)):
            raise InputError(f"marked point must be a finite vector, got {p.tolist()}")
        self.p = p

    @property
    def kind(self) -> str:
        return "euclidean"

    @property
    def dim(self) -> int:
        return self.p.size

    def distances(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return np.linalg.norm(xs - ys, axis=1)

    def constant(self, prefix: int) -> np.ndarray:
        return np.tile(self.p, (prefix, 1))

    def vector(self, v: Optional[Sequence[float]], name: str, label: str) -> np.ndarray:
        if v is None:
            raise InputError(f"sequence {label!r} needs {name}")
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise InputError(f"sequence {label!r}: {name} must have {self.dim} coordinates, got {v.size}")
        return v

    def coerce_points(self, points: Sequence[Any], label: str) -> np.ndarray:
        try:
            array = np.asarray(points, dtype=float)
        except (TypeError, ValueError) as e:
            raise InputError(f"sequence {label!r}: points must be coordinate vectors ({e})") from e
        if array.ndim == 1 and self.dim == 1:
            array = array[:, None]
        if array.ndim != 2 or array.shape[1] != self.dim or not np.all(np.isfinite(array)):
            raise InputError(f"sequence {label!r}: expected finite points of dimension {self.dim}")
        return array

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "dim": self.dim, "p": self.p.tolist()}


class TabulatedSpace(AmbientSpace):
    """
    Finite metric space given by its distance table; points are label indices.

    Raises:
        InputError: the table is not a metric or p is not one of its labels
    """

    def __init__(self, metric: FiniteMetric, p: str, tol: Optional[Tolerance] = None):
        report = check_metric(metric, tol)
        if not report.passed:
            raise InputError(f"tabulated ambient is not a metric: {report.witness.condition} fails")
        self.metric = metric
        self.p_index = metric.universe.index_of(p)

    @property
    def kind(self) -> str:
        return "tabulated"

    @property
    def universe(self) -> Universe:
        return self.metric.universe

    def distances(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return self.metric.dist[xs, ys]

    def constant(self, prefix: int) -> np.ndarray:
        return np.full(prefix, self.p_index, dtype=np.int64)

    def coerce_points(self, points: Sequence[Any], label: str) -> np.ndarray:
        index = self.universe.index_map()
        try:
            return np.array([index[str(x)] for x in points], dtype=np.int64)
        except KeyError as e:
            raise InputError(f"sequence {label!r}: unknown point label {e.args[0]!r}") from None

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "labels": list(self.universe.names),
            "p": self.universe.names[self.p_index],
        }


class OracleSpace(AmbientSpace):
    """
    Ambient given by a distance callback over opaque point payloads.

    Axioms cannot be verified in general; spot_check samples triples of the
    points that actually occur.
    """

    def __init__(self, distance: Callable[[Any, Any], float], p: Any):
        self.distance = distance
        self.p = p

    @property
    def kind(self) -> str:
        return "oracle"

    def distances(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return np.fromiter((self.distance(x, y) for x, y in zip(xs, ys)), dtype=float, count=len(xs))

    def constant(self, prefix: int) -> np.ndarray:
        array = np.empty(prefix, dtype=object)
        array[:] = [self.p] * prefix
        return array

    def coerce_points(self, points: Sequence[Any], label: str) -> np.ndarray:
        array = np.empty(len(points), dtype=object)
        array[:] = list(points)
        return array

    def spot_check(self, sequences: Sequence["PointSequence"], count: int, seed: int, tol: Tolerance) -> int:
        """
        Sample triples of materialized points and test the metric axioms.

        Returns:
            Number of triples examined

        Raises:
            InputError: symmetry, nonnegativity, identity or triangle fails
        """
        pool = np.concatenate([s.points for s in sequences] + [self.constant(1)])
        rng = np.random.default_rng(seed)
        picks = rng.integers(0, len(pool), size=(count, 3))
        for i, j, k in picks:
            x, y, z = pool[i], pool[j], pool[k]
            dxy, dyx = self.distance(x, y), self.distance(y, x)
            dxz, dzy = self.distance(x, z), self.distance(z, y)
            if not tol.eq(dxy, dyx):
                raise InputError(f"oracle distance is not symmetric: {dxy} vs {dyx}")
            if min(dxy, dxz, dzy) < 0:
                raise InputError("oracle distance takes a negative value")
            if not tol.eq(self.distance(x, x), 0.0):
                raise InputError("oracle distance is nonzero on the diagonal")
            if tol.exceeds(dxy, dxz + dzy):
                raise InputError(f"oracle distance violates the triangle inequality: {dxy} > {dxz} + {dzy}")
        logger.debug("oracle_spot_checked", triples=count)
        return count


def ambient_from_spec(spec: AmbientSpec) -> AmbientSpace:
    """Build the ambient declared in a scenario file."""
    if spec.kind == AmbientKind.EUCLIDEAN:
        if isinstance(spec.p, str):
            raise InputError("euclidean marked point must be a coordinate list")
        space = EuclideanSpace(spec.p)
        if spec.dim is not None and spec.dim != space.dim:
            raise InputError(f"ambient dim is {spec.dim} but p has {space.dim} coordinates")
        return space
    if spec.labels is None or spec.dist is None or not isinstance(spec.p, str):
        raise InputError("tabulated ambient needs labels, dist and a point label p")
    metric = FiniteMetric(Universe.from_labels(spec.labels), spec.dist)
    return TabulatedSpace(metric, spec.p)


# ============================================================================
# Normalizing sequences and selectors
# ============================================================================

class NormalizingSequence:
    """
    Positive reals r_1..r_M tending to zero.

    Raises:
        InputError: some r_m is not positive and finite, or a tabulated tail
            increases
    """

    def __init__(self, values: Sequence[float], form: str = "tabulated"):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.size < 8:
            raise InputError("normalizing sequence needs at least 8 values")
        bad = ~(np.isfinite(values) & (values > 0))
        if bad.any():
            m = int(np.flatnonzero(bad)[0]) + 1
            raise InputError(f"normalizing sequence must be positive: r_{m} = {values[m - 1]}")
        tail = values[values.size // 2:]
        if form == "tabulated" and np.any(np.diff(tail) > 0):
            raise InputError("tabulated normalizing sequence must be nonincreasing over its last half")
        values.setflags(write=False)
        self.values = values
        self.form = form

    @classmethod
    def power(cls, prefix: int, a: float, c: float = 1.0) -> "NormalizingSequence":
        m = np.arange(1, prefix + 1, dtype=float)
        return cls(c * m ** (-a), form="power")

    @classmethod
    def geometric(cls, prefix: int, q: float, c: float = 1.0) -> "NormalizingSequence":
        m = np.arange(1, prefix + 1, dtype=float)
        return cls(c * q ** m, form="geometric")

    @classmethod
    def from_spec(cls, spec: NormalizingSpec, prefix: int) -> "NormalizingSequence":
        if spec.form == NormalizingForm.POWER:
            if spec.a is None:
                raise InputError("power normalizing sequence needs a")
            return cls.power(prefix, spec.a, spec.c)
        if spec.form == NormalizingForm.GEOMETRIC:
            if spec.q is None:
                raise InputError("geometric normalizing sequence needs q")
            return cls.geometric(prefix, spec.q, spec.c)
        if spec.values is None or len(spec.values) != prefix:
            raise InputError(f"tabulated normalizing sequence needs exactly M = {prefix} values")
        return cls(spec.values)

    @property
    def prefix(self) -> int:
        return self.values.size


class LimitSelector(BaseModel):
    """Index set on which limits are taken."""

    model_config = ConfigDict(frozen=True)

    mode: SelectorMode = SelectorMode.ORDINARY
    start: int = Field(default=0, ge=0)
    step: int = Field(default=1, ge=1)

    @classmethod
    def ordinary(cls) -> "LimitSelector":
        return cls()

    @classmethod
    def subsequence(cls, start: int, step: int) -> "LimitSelector":
        return cls(mode=SelectorMode.SUBSEQUENCE, start=start, step=step)

    @classmethod
    def from_spec(cls, spec: SelectorSpec) -> "LimitSelector":
        return cls(mode=spec.mode, start=spec.start, step=spec.step)

    def indices(self, prefix: int) -> np.ndarray:
        """
        0-based positions of the selected 1-based indices m.

        Raises:
            InputError: fewer than M/4 indices are selected
        """
        if self.mode == SelectorMode.ORDINARY:
            return np.arange(prefix)
        m = np.arange(1, prefix + 1)
        picked = np.flatnonzero(m % self.step == self.start % self.step)
        if picked.size < prefix // 4:
            raise InputError(
                f"selector m = {self.start} (mod {self.step}) keeps {picked.size} of {prefix} indices; "
                f"at least {prefix // 4} are required"
            )
        return picked

    def describe(self) -> str:
        if self.mode == SelectorMode.ORDINARY:
            return "ordinary"
        return f"m = {self.start} (mod {self.step})"


# ============================================================================
# Point sequences
# ============================================================================

class PointSequence:
    """
    Labelled prefix x_1..x_M of a sequence in an ambient space.

    Args:
        label: Sequence label
        space: Ambient the points live in
        points: Internal array form, first axis indexed by m - 1
    """

    __slots__ = ("label", "space", "points")

    def __init__(self, label: str, space: AmbientSpace, points: np.ndarray):
        self.label = label
        self.space = space
        self.points = points

    @classmethod
    def marked(cls, space: AmbientSpace, prefix: int) -> "PointSequence":
        """The constant sequence p~ = (p, p, ...)."""
        return cls(MARKED_LABEL, space, space.constant(prefix))

    @classmethod
    def from_spec(cls, spec: SequenceSpec, space: AmbientSpace, r: NormalizingSequence) -> "PointSequence":
        """
        Materialize one pool entry over the prefix of r.

        Raises:
            InputError: the form does not fit the ambient, a direction is
                missing or malformed, or a tabulated prefix has the wrong length
        """
        prefix = r.prefix
        label = spec.label
        if spec.form == SequenceForm.CONSTANT:
            return cls(label, space, space.constant(prefix))
        if spec.form == SequenceForm.TABULATED:
            if spec.points is None or len(spec.points) != prefix:
                got = 0 if spec.points is None else len(spec.points)
                raise InputError(f"sequence {label!r} has {got} points, the prefix length is {prefix}")
            return cls(label, space, space.coerce_points(spec.points, label))
        if not isinstance(space, EuclideanSpace):
            raise InputError(f"sequence {label!r}: {spec.form.value} form needs a euclidean ambient")

        rm = r.values[:, None]
        v = space.vector(spec.v, "v", label)
        if spec.form == SequenceForm.LINEAR:
            offset = rm * v
        elif spec.form == SequenceForm.ANALYTIC:
            if spec.alpha is None:
                raise InputError(f"sequence {label!r} needs alpha > 1")
            offset = rm * v + rm ** spec.alpha * space.vector(spec.w, "w", label)
        elif spec.form == SequenceForm.POWER:
            if spec.beta is None:
                raise InputError(f"sequence {label!r} needs beta > 0")
            offset = rm ** spec.beta * v
        else:
            w = space.vector(spec.w, "w", label)
            even = (np.arange(1, prefix + 1) % 2 == 0)[:, None]
            offset = np.where(even, rm * v, rm * w)
        return cls(label, space, space.p + offset)

    @property
    def prefix(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"PointSequence({self.label!r}, M={self.prefix})"
