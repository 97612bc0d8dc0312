"""
Tail estimates for rescaled quantities.

A quantity q_1..q_M is judged on the selector's index set. The estimate is
the mean of the last quarter of the selected values and the spread is
max - min over that window; with scale s = max(1, |estimate|):

    stable        spread <= tol * s
    unstable      spread >  3 * tol * s, or a non-finite value in the window
    inconclusive  otherwise

A tail that is monotone but still moving (q_m = L + c * m^-a, a > 0) is
judged on Richardson extrapolation instead. The selected values at m/4, m/2
and m give L exactly when the increments shrink by a constant factor per
doubling; m/8, m/4, m/2 give a second estimate, and the disagreement of the
two takes the place of the spread in the bands above.
"""

from enum import Enum
from typing import Optional, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, Field

from ..exceptions import InputError
from .scenario import LimitSelector, NormalizingSequence, PointSequence

logger = structlog.get_logger()

# Largest per-doubling shrink factor of the increments that counts as settling
SETTLING_RATIO = 0.9


class StabilityStatus(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    INCONCLUSIVE = "inconclusive"


class StabilityVerdict(BaseModel):
    """Outcome of a tail estimate."""

    status: StabilityStatus
    limit: Optional[float] = Field(None, description="Tail estimate; present iff stable")
    tail_spread: float = Field(..., description="max - min of the decision window")
    window: int = Field(..., ge=1, description="Number of values in the decision window")
    extrapolated: bool = Field(default=False, description="Limit taken from the Richardson extrapolation")

    @property
    def stable(self) -> bool:
        return self.status == StabilityStatus.STABLE


def _doubling_estimate(v1: float, v2: float, v3: float, ratio: float) -> Optional[float]:
    """Limit from values at m/4, m/2, m whose increments shrink geometrically."""
    d1, d2 = v2 - v1, v3 - v2
    if d1 == 0.0 and d2 == 0.0:
        return v3
    if d1 == 0.0 or d1 * d2 <= 0.0:
        return None
    q = d2 / d1
    if q > ratio:
        return None
    return v3 + d2 * q / (1.0 - q)


def extrapolated_limit(selected: np.ndarray, ratio: float = SETTLING_RATIO) -> Optional[Tuple[float, float]]:
    """
    Richardson extrapolation of a settling tail.

    Args:
        selected: Values on the selector's index set, in index order
        ratio: Largest accepted shrink factor of the increments per doubling

    Returns:
        (limit, disagreement of the two doubling estimates), or None when the
        last half is not monotone or the increments do not shrink
    """
    n = selected.size
    if n < 16 or not np.all(np.isfinite(selected)):
        return None
    half = selected[n // 2:]
    slack = 1e-12 * max(1.0, float(np.abs(half).max()))
    steps = np.diff(half)
    if not (np.all(steps >= -slack) or np.all(steps <= slack)):
        return None
    last, at_half, at_quarter, at_eighth = (float(selected[n // 2 ** k - 1]) for k in range(4))
    late = _doubling_estimate(at_quarter, at_half, last, ratio)
    early = _doubling_estimate(at_eighth, at_quarter, at_half, ratio)
    if late is None or early is None:
        return None
    if np.all(selected >= 0):
        late, early = max(late, 0.0), max(early, 0.0)
    return late, abs(late - early)


def tail_estimate(
    values: np.ndarray, selector: LimitSelector, tol: float, ratio: float = SETTLING_RATIO
) -> StabilityVerdict:
    """Classify the tail of values on the selector's index set."""
    selected = values[selector.indices(values.size)]
    window = selected[-max(1, selected.size // 4):]
    if not np.all(np.isfinite(window)):
        return StabilityVerdict(status=StabilityStatus.UNSTABLE, tail_spread=float("inf"), window=window.size)
    estimate = float(window.mean())
    spread = float(window.max() - window.min())
    scale = max(1.0, abs(estimate))
    if spread <= tol * scale:
        return StabilityVerdict(status=StabilityStatus.STABLE, limit=estimate, tail_spread=spread, window=window.size)

    settled = extrapolated_limit(selected, ratio)
    if settled is not None:
        limit, disagreement = settled
        scale = max(1.0, abs(limit))
        if disagreement <= tol * scale:
            return StabilityVerdict(
                status=StabilityStatus.STABLE,
                limit=limit,
                tail_spread=spread,
                window=window.size,
                extrapolated=True,
            )
        spread = disagreement

    status = StabilityStatus.UNSTABLE if spread > 3 * tol * scale else StabilityStatus.INCONCLUSIVE
    return StabilityVerdict(status=status, tail_spread=spread, window=window.size)


def vanishes(
    values: np.ndarray, selector: LimitSelector, tol: float, ratio: float = SETTLING_RATIO
) -> Tuple[bool, float]:
    """
    Numerical test of values -> 0 on the selector's index set.

    Passes when the last-quarter max of |values| is at most tol, or when the
    tail settles and both doubling estimates of its limit are within tol
    of 0. Early values never count in favour of the test.

    Returns:
        (passed, extrapolated limit when the tail settles, else the mean of
        the last quarter)
    """
    selected = np.abs(values[selector.indices(values.size)])
    tail = selected[-max(1, selected.size // 4):]
    if not np.all(np.isfinite(tail)):
        return False, float("inf")
    if float(tail.max()) <= tol:
        return True, float(tail.mean())
    settled = extrapolated_limit(selected, ratio)
    if settled is None:
        return False, float(tail.mean())
    limit, disagreement = settled
    return limit + disagreement <= tol, limit


def converges_to_marked(seq: PointSequence, envelope_ratio: float) -> Tuple[bool, str]:
    """
    Membership test d(x_m, p) -> 0 over the full prefix.

    The max over the last half must be at most envelope_ratio times the max
    over the first half, or the last half must sit exactly at p.

    Returns:
        (passed, reason on failure)
    """
    to_p = seq.space.to_marked(seq.points)
    half = to_p.size // 2
    head, tail = float(to_p[:half].max()), float(to_p[half:].max())
    if tail == 0.0 or tail <= envelope_ratio * head:
        return True, ""
    return False, f"d(x_m, p) does not decay: tail max {tail:.6g} vs head max {head:.6g}"


def rescaled_ratio(values: np.ndarray, r: NormalizingSequence) -> np.ndarray:
    """values_m / r_m, after checking the prefix lengths agree."""
    if values.size != r.prefix:
        raise InputError(f"prefix length {values.size} does not match the normalizing sequence ({r.prefix})")
    return values / r.values


def mutual_stability(
    x: PointSequence,
    y: PointSequence,
    r: NormalizingSequence,
    sel: LimitSelector,
    tol: float,
    ratio: float = SETTLING_RATIO,
) -> StabilityVerdict:
    """
    Decide whether lim d(x_m, y_m) / r_m exists on the selector's index set.

    Raises:
        InputError: the sequences live in different ambients or have
            different prefix lengths
    """
    if x.space is not y.space:
        raise InputError(f"sequences {x.label!r} and {y.label!r} live in different ambient spaces")
    if x.prefix != y.prefix:
        raise InputError(f"sequences {x.label!r} and {y.label!r} have prefix lengths {x.prefix} and {y.prefix}")
    verdict = tail_estimate(rescaled_ratio(x.space.distances(x.points, y.points), r), sel, tol, ratio)
    logger.debug("mutual_stability", x=x.label, y=y.label, status=verdict.status.value, spread=verdict.tail_spread)
    return verdict
