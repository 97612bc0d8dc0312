"""Axiom checkers returning CheckReports with witnesses."""

from .metrics import check_g_metric, check_metric, check_symmetric_g, is_ultrametric
from .set_functions import (
    check_balk,
    check_increasing,
    check_k_increasing,
    check_k_weakly_decreasing,
    check_ultra_balk,
)
from .witness import shrink_witness

__all__ = [
    "check_balk",
    "check_increasing",
    "check_k_increasing",
    "check_k_weakly_decreasing",
    "check_ultra_balk",
    "check_g_metric",
    "check_metric",
    "check_symmetric_g",
    "is_ultrametric",
    "shrink_witness",
]
