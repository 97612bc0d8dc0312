"""Finite universes, subset encodings, tables and tolerance."""

from .bitsets import MAX_UNIVERSE, popcounts
from .tables import FiniteMetric, GMetricTable, SetFunction, tau_eval
from .tolerance import Tolerance, ToleranceMode
from .universe import (
    Universe,
    canonical_subset_key,
    image_set,
    parse_subset_key,
)

__all__ = [
    "MAX_UNIVERSE",
    "popcounts",
    "FiniteMetric",
    "GMetricTable",
    "SetFunction",
    "tau_eval",
    "Tolerance",
    "ToleranceMode",
    "Universe",
    "canonical_subset_key",
    "image_set",
    "parse_subset_key",
]
