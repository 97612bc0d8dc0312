"""
Tolerance-mediated real comparison.

All comparisons in the package go through a Tolerance so that float noise is
handled in one place. Methods accept scalars or numpy arrays and broadcast.
"""

from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class ToleranceMode(str, Enum):
    """How the comparison margin scales with the compared values."""
    ABSOLUTE = "absolute"
    RELATIVE = "relative"


class Tolerance(BaseModel):
    """Comparison margin used by every checker."""

    model_config = ConfigDict(frozen=True)

    eps: float = Field(default=1e-9, ge=0, description="Comparison margin")
    mode: ToleranceMode = Field(
        default=ToleranceMode.RELATIVE,
        description="absolute: |a-b| <= eps; relative: |a-b| <= eps*max(1,|a|,|b|)"
    )

    def margin(self, a, b=0.0):
        """Margin allowed when comparing a with b."""
        if self.mode == ToleranceMode.ABSOLUTE:
            return self.eps * np.ones_like(np.asarray(a, dtype=float) + np.asarray(b, dtype=float))
        with np.errstate(invalid="ignore"):
            scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
        return self.eps * scale

    def eq(self, a, b):
        """a == b within tolerance."""
        return np.abs(np.asarray(a) - np.asarray(b)) <= self.margin(a, b)

    def le(self, a, b):
        """a <= b within tolerance."""
        return np.asarray(a) <= np.asarray(b) + self.margin(a, b)

    def exceeds(self, a, b):
        """a > b by more than the margin, i.e. a <= b is violated."""
        return np.asarray(a) > np.asarray(b) + self.margin(a, b)

    def lt(self, a, b):
        """Strict a < b, tested as a <= b - margin."""
        return np.asarray(a) <= np.asarray(b) - self.margin(a, b)

    def positive(self, value):
        """Strict 0 < value, tested as value > margin."""
        return np.asarray(value) > self.margin(value)

    def on_boundary(self, value):
        """0 < value <= margin: positive in exact arithmetic, not separable from zero here."""
        v = np.asarray(value)
        return (v > 0) & (v <= self.margin(value))

    def scaled(self, factor: float) -> "Tolerance":
        """Same mode with eps multiplied by factor."""
        return Tolerance(eps=self.eps * factor, mode=self.mode)
