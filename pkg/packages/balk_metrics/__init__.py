"""
Extended metrics on finite subsets, made executable.

This package verifies the extended-metric axioms on finite universes with
concrete counterexample witnesses, converts between metrics, symmetric
G-metrics and extended metrics, evaluates the diameter characterisations
clause by clause, and estimates pretangent spaces at a marked point.

Usage:
    from balk_metrics import BalkConfig, check_balk, diameter_balk, random_metric

    config = BalkConfig.from_env()
    tau = diameter_balk(random_metric(5, seed=0))
    report = check_balk(tau, config=config)
    assert report.passed

    # Pretangent spaces
    pipeline = PretangentPipeline(load_scenario("linear3.json"), config)
    space = pipeline.build()
"""

__version__ = "0.1.0"
__all__ = [
    "BalkConfig",
    "CheckReport",
    "EquivalenceReport",
    "Universe",
    "SetFunction",
    "FiniteMetric",
    "GMetricTable",
    "Tolerance",
    "check_balk",
    "check_metric",
    "diameter_balk",
    "random_metric",
    "PretangentPipeline",
    "load_scenario",
]

_LOCATIONS = {
    "BalkConfig": "config",
    "CheckReport": "config",
    "EquivalenceReport": "config",
    "Universe": "core",
    "SetFunction": "core",
    "FiniteMetric": "core",
    "GMetricTable": "core",
    "Tolerance": "core",
    "check_balk": "axioms",
    "check_metric": "axioms",
    "diameter_balk": "construct",
    "random_metric": "construct",
    "PretangentPipeline": "pretangent",
    "load_scenario": "storage",
}


# Lazy imports to keep `python -m balk_metrics --help` light
def __getattr__(name):
    if name in _LOCATIONS:
        from importlib import import_module
        return getattr(import_module(f".{_LOCATIONS[name]}", __name__), name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
