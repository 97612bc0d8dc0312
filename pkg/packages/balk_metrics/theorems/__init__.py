"""Executable oracles for the equivalence statements and inequality bounds."""

from .equivalences import (
    require_extended_metric,
    verify_k_diameter_equivalence,
    verify_pair_generated_equivalence,
    verify_triple_generated_equivalence,
)
from .inequalities import verify_chain_bound, verify_half_pair_bound

__all__ = [
    "require_extended_metric",
    "verify_k_diameter_equivalence",
    "verify_pair_generated_equivalence",
    "verify_triple_generated_equivalence",
    "verify_chain_bound",
    "verify_half_pair_bound",
]
