"""
Pytest fixtures and configuration for balk_metrics tests.

Provides common fixtures for:
- Universes and tolerances
- Metrics, set functions and G tables
- Pretangent scenarios
- Scenario and table files in temporary directories
"""

import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.cluster.hierarchy import cophenet, linkage
from scipy.spatial.distance import pdist, squareform

# Add package path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from balk_metrics.config import BalkConfig
from balk_metrics.construct import diameter_balk, max_pairwise_g, random_metric, stepped_cardinality_metric
from balk_metrics.core import FiniteMetric, SetFunction, Tolerance, Universe, popcounts
from balk_metrics.core.bitsets import subset_max
from balk_metrics.pretangent.scenario import PretangentScenario
from balk_metrics.storage import write_document


# ============================================================================
# Configuration Fixtures
# ============================================================================

@pytest.fixture
def config():
    """Default configuration, independent of the environment."""
    return BalkConfig()


@pytest.fixture
def tol():
    return Tolerance()


# ============================================================================
# Universe and Metric Fixtures
# ============================================================================

@pytest.fixture
def abc():
    """Three labelled points."""
    return Universe(names=("a", "b", "c"))


@pytest.fixture
def line_metric(abc):
    """a, b, c at 0, 1, 3 on the real line."""
    return FiniteMetric(abc, [[0, 1, 3], [1, 0, 2], [3, 2, 0]])


@pytest.fixture
def ultra_metric():
    """Four points forming an ultrametric: {a, b} close, {c}, {d} far."""
    u = Universe(names=("a", "b", "c", "d"))
    return FiniteMetric(u, [
        [0, 1, 2, 4],
        [1, 0, 2, 4],
        [2, 2, 0, 4],
        [4, 4, 4, 0],
    ])


@pytest.fixture
def random_metric_5():
    return random_metric(5, seed=7)


# ============================================================================
# Set Function Fixtures
# ============================================================================

@pytest.fixture
def diam_tau(line_metric):
    """Diameter extended metric of line_metric."""
    return diameter_balk(line_metric)


@pytest.fixture
def stepped_5_2():
    """Cardinality-stepped table with n = 5, k = 2."""
    return stepped_cardinality_metric(5, 2)


@pytest.fixture
def sum_tau(abc):
    """Sum of pairwise distances of the line metric; the triangle axiom fails for A = {a}, B = {b, c}, C = {b}."""
    d = np.array([[0, 1, 3], [1, 0, 2], [3, 2, 0]], dtype=float)
    values = []
    for mask in range(1, 8):
        members = [i for i in range(3) if mask >> i & 1]
        values.append(sum(d[i, j] for i in members for j in members if i < j))
    return SetFunction(abc, values)


@pytest.fixture
def g_table(random_metric_5):
    return max_pairwise_g(random_metric_5)


# ============================================================================
# Scenario Fixtures
# ============================================================================

def linear_scenario(coefficients, prefix=10_000, **extra):
    """Real line at p = 0, r_m = 1/m, sequences a/m."""
    document = {
        "ambient": {"kind": "euclidean", "dim": 1, "p": [0.0]},
        "normalizing": {"form": "power", "c": 1.0, "a": 1.0},
        "M": prefix,
        "selector": {"mode": "ordinary"},
        "sequences": [
            {"label": f"x{a:g}", "form": "linear", "v": [float(a)]} for a in coefficients
        ],
        "tolerance": 1e-6,
    }
    document.update(extra)
    return document


@pytest.fixture
def linear3_document():
    return linear_scenario([1.0, 2.5, 4.0])


@pytest.fixture
def linear3(linear3_document):
    return PretangentScenario.model_validate(linear3_document)


@pytest.fixture
def real_line_triple_document():
    """t, 2t, 4t with t = 1/m, declared as one triple."""
    return linear_scenario([1.0, 2.0, 4.0], triples=[["x1", "x2", "x4"]])


@pytest.fixture
def tabulated_ultra_document():
    """Ultrametric ambient {p, a, b, c}; three sequences that sit away from p, then reach it."""
    prefix = 1_000
    half = prefix // 2

    def settling(label):
        return {"label": label, "form": "tabulated", "points": [label] * half + ["p"] * half}

    return {
        "ambient": {
            "kind": "tabulated",
            "labels": ["p", "a", "b", "c"],
            "p": "p",
            "dist": [
                [0, 1, 1, 2],
                [1, 0, 1, 2],
                [1, 1, 0, 2],
                [2, 2, 2, 0],
            ],
        },
        "normalizing": {"form": "power", "c": 1.0, "a": 1.0},
        "M": prefix,
        "sequences": [settling("a"), settling("b"), settling("c")],
        "triples": [["a", "b", "c"]],
    }


# ============================================================================
# File Fixtures
# ============================================================================

@pytest.fixture
def write_json(tmp_path):
    """Write a table, report or raw document under tmp_path and return the path."""
    def _write(name, obj):
        return write_document(obj, tmp_path / name)
    return _write


# ============================================================================
# Seeded Generators
# ============================================================================

def random_set_function(n, seed, shape="raw", k=2, low=1.0):
    """
    Seeded set function on x0 .. x{n-1}: 0 on singletons, uniform in [low, 2] elsewhere.

    shape "increasing" replaces each value by the max over its subsets;
    "k-diameter" by the max over its subsets with at most k elements.
    """
    rng = np.random.default_rng(seed)
    pc = popcounts(n)
    table = np.where(pc >= 2, low + (2.0 - low) * rng.random(1 << n), 0.0)
    if shape == "increasing":
        table = subset_max(table, n)[0]
    elif shape == "k-diameter":
        table = subset_max(np.where(pc <= k, table, -np.inf), n)[0]
    return SetFunction.from_table(Universe.indexed(n), table)


def spread_metric(n, seed):
    """Seeded metric with every off-diagonal distance in [1, 1.5]."""
    rng = np.random.default_rng(seed)
    upper = np.triu(1.0 + 0.5 * rng.random((n, n)), 1)
    return FiniteMetric(Universe.indexed(n), upper + upper.T)


def random_ultrametric(n, seed):
    """Cophenetic distances of a single-linkage tree over seeded points in the unit square."""
    points = np.random.default_rng(seed).random((n, 2))
    return FiniteMetric(Universe.indexed(n), squareform(cophenet(linkage(pdist(points), "single"))))
