"""Constructive maps between metrics, G-metrics and extended metrics."""

from .conversions import balk_to_g, checked_balk_to_g, extend_partial, g_to_balk, g_to_partial
from .diameters import (
    checked_tau_squared,
    diameter_balk,
    generalized_diameter,
    generalized_diameter_table,
    max_pair_table,
    project_tau_k,
    tau_squared,
)
from .generators import (
    default_steps,
    max_pairwise_g,
    perturbed_symmetric_g,
    random_metric,
    repaired_perturbation,
    stepped_cardinality_metric,
)
from .partial import PartialSetFunction, restrict_to_cardinality

__all__ = [
    "balk_to_g",
    "checked_balk_to_g",
    "extend_partial",
    "g_to_balk",
    "g_to_partial",
    "checked_tau_squared",
    "diameter_balk",
    "generalized_diameter",
    "generalized_diameter_table",
    "max_pair_table",
    "project_tau_k",
    "tau_squared",
    "default_steps",
    "max_pairwise_g",
    "perturbed_symmetric_g",
    "random_metric",
    "repaired_perturbation",
    "stepped_cardinality_metric",
    "PartialSetFunction",
    "restrict_to_cardinality",
]
