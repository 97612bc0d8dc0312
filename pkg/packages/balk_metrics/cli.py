"""
CLI interface for balk_metrics.

Provides commands for:
- Checking axioms of set functions, metrics and G tables
- Constructing tables (diameters, conversions, generators)
- Generalized diameters
- Verifying equivalences and inequality bounds
- Pretangent spaces, lifts and infinitesimal criteria

Every run writes one report document to stdout or --output. Exit codes:
0 pass/success, 1 fail/violation, 2 input error.
"""

import functools
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import click
import structlog
from pydantic import BaseModel, ValidationError

from .axioms import (
    check_balk,
    check_g_metric,
    check_increasing,
    check_k_increasing,
    check_k_weakly_decreasing,
    check_metric,
    check_symmetric_g,
    check_ultra_balk,
)
from .config import BalkConfig, CheckReport, EquivalenceReport
from .construct import (
    checked_balk_to_g,
    checked_tau_squared,
    diameter_balk,
    extend_partial,
    g_to_balk,
    generalized_diameter,
    generalized_diameter_table,
    max_pairwise_g,
    perturbed_symmetric_g,
    random_metric,
    stepped_cardinality_metric,
)
from .core.tolerance import ToleranceMode
from .core.universe import canonical_subset_key, parse_subset_key
from .exceptions import ConstructionError, InputError, PretangentError
from .pretangent.pipeline import PretangentPipeline
from .pretangent.scenario import TauRuleKind, TauRuleSpec
from .storage import encode, load_g_table, load_metric, load_partial, load_scenario, load_set_function, to_document
from .theorems import (
    verify_chain_bound,
    verify_half_pair_bound,
    verify_k_diameter_equivalence,
    verify_pair_generated_equivalence,
    verify_triple_generated_equivalence,
)

# Configure structured logging
structlog.configure(
    processors=[
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        structlog.dev.ConsoleRenderer(colors=False)
    ],
    wrapper_class=structlog.stdlib.BoundLogger,
    context_class=dict,
    logger_factory=structlog.stdlib.LoggerFactory(),
    cache_logger_on_first_use=True,
)

logger = structlog.get_logger()

Outcome = Tuple[Any, bool]


# ============================================================================
# Output
# ============================================================================

def _flatten(value: Any, prefix: str, rows: List[Tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(value[key], f"{prefix}.{key}" if prefix else str(key), rows)
    elif isinstance(value, list) and any(isinstance(v, (dict, list)) for v in value):
        for i, item in enumerate(value):
            _flatten(item, f"{prefix}[{i}]", rows)
    elif isinstance(value, list):
        rows.append((prefix, ", ".join(str(v) for v in value)))
    else:
        rows.append((prefix, str(value)))


def render_text(document: Dict[str, Any]) -> str:
    """Aligned 'key  value' lines for any report document."""
    rows: List[Tuple[str, str]] = []
    _flatten(document, "", rows)
    width = max((len(key) for key, _ in rows), default=0)
    return "".join(f"{key.ljust(width)}  {value}\n" for key, value in rows)


def _emit(ctx: click.Context, result: Any, output: Optional[str]) -> None:
    if ctx.obj["format"] == "text":
        text = render_text(to_document(result))
    else:
        text = encode(result)
    if output:
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info("report_written", path=str(path))
    else:
        click.echo(text, nl=False)


def reported(fn: Callable[..., Outcome]) -> Callable:
    """
    Run a command body returning (result, passed) and apply the exit-code contract.

    InputError exits 2 with the message on stderr. ConstructionError and
    PretangentError write their report or diagnostic and exit 1.
    """
    @click.option("--output", "--out", "output", type=click.Path(dir_okay=False), help="Write the report here")
    @click.pass_context
    @functools.wraps(fn)
    def wrapper(ctx: click.Context, *args, output: Optional[str] = None, **kwargs):
        try:
            result, passed = fn(ctx.obj["config"], *args, **kwargs)
        except InputError as e:
            logger.error("input_rejected", error=str(e))
            click.echo(f"error: {e}", err=True)
            ctx.exit(2)
        except ConstructionError as e:
            logger.error("construction_failed", error=str(e), inconsistency=e.inconsistency)
            result = e.report if e.report is not None else {"error": str(e)}
            passed = False
        except PretangentError as e:
            result, passed = {"error": str(e), "diagnostic": e.diagnostic}, False
        _emit(ctx, result, output)
        ctx.exit(0 if passed else 1)

    return wrapper


def _passed(report: BaseModel) -> bool:
    if isinstance(report, EquivalenceReport):
        return report.agree
    return getattr(report, "passed", True)


# ============================================================================
# Root group
# ============================================================================

@click.group()
@click.option("--epsilon", type=float, default=None, help="Comparison margin (default 1e-9)")
@click.option(
    "--tolerance-mode",
    type=click.Choice([m.value for m in ToleranceMode]),
    default=None,
    help="How the margin scales with the compared values"
)
@click.option("--budget", type=int, default=None, help="Sample budget above the exhaustive caps")
@click.option("--seed", type=int, default=None, help="Seed for sampled checks and generators")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", help="Report format")
@click.option("--progress", is_flag=True, help="Show progress bars on long sweeps")
@click.option(
    "--verbose", "-v",
    is_flag=True,
    help="Enable verbose logging"
)
@click.pass_context
def cli(ctx, epsilon: Optional[float], tolerance_mode: Optional[str], budget: Optional[int],
        seed: Optional[int], fmt: str, progress: bool, verbose: bool):
    """Executable extended metrics on finite universes."""
    ctx.ensure_object(dict)

    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if verbose else logging.INFO)

    overrides = {
        "epsilon": epsilon,
        "tolerance_mode": tolerance_mode,
        "sample_budget": budget,
        "lemma_sample_budget": budget,
        "seed": seed,
        "show_progress": progress or None,
    }
    try:
        base = BalkConfig.from_env().model_dump()
        config = BalkConfig(**{**base, **{k: v for k, v in overrides.items() if v is not None}})
    except ValidationError as e:
        raise click.UsageError(f"invalid configuration: {e.errors()[0]['msg']}")

    ctx.obj["config"] = config
    ctx.obj["format"] = fmt


# ============================================================================
# check
# ============================================================================

SET_FUNCTION_CHECKS = {"balk": check_balk, "ultra": check_ultra_balk, "increasing": check_increasing}
K_CHECKS = {"k-increasing": check_k_increasing, "k-weakly-decreasing": check_k_weakly_decreasing}
CHECK_KINDS = [*SET_FUNCTION_CHECKS, *K_CHECKS, "metric", "g", "symmetric-g"]


@cli.command()
@click.option("--kind", type=click.Choice(CHECK_KINDS), required=True, help="Axiom family to check")
@click.option("--input", "input_path", type=click.Path(), required=True, help="Table to check")
@click.option("--k", type=int, default=None, help="Arity for k-increasing / k-weakly-decreasing")
@reported
def check(config: BalkConfig, kind: str, input_path: str, k: Optional[int]) -> Outcome:
    """Check the axioms of a table."""
    tol = config.tolerance()
    if kind in SET_FUNCTION_CHECKS:
        report = SET_FUNCTION_CHECKS[kind](load_set_function(input_path), tol, config)
    elif kind in K_CHECKS:
        if k is None:
            raise InputError(f"--k is required for {kind}")
        report = K_CHECKS[kind](load_set_function(input_path), k, tol, config)
    elif kind == "metric":
        report = check_metric(load_metric(input_path), tol, config)
    elif kind == "g":
        report = check_g_metric(load_g_table(input_path), tol, config)
    else:
        report = check_symmetric_g(load_g_table(input_path), tol, config)
    logger.info("check_completed", kind=kind, verdict=report.verdict.value)
    return report, report.passed


# ============================================================================
# construct
# ============================================================================

@cli.group()
def construct():
    """Build tables from other tables or from generators."""
    pass


@construct.command("diam")
@click.option("--metric", "metric_path", type=click.Path(), required=True, help="Metric table")
@reported
def construct_diam(config: BalkConfig, metric_path: str) -> Outcome:
    """Diameter extended metric of a metric."""
    return diameter_balk(load_metric(metric_path), config.tolerance(), config), True


@construct.command("tau2")
@click.option("--tau", "tau_path", type=click.Path(), required=True, help="Set function")
@reported
def construct_tau2(config: BalkConfig, tau_path: str) -> Outcome:
    """Pair metric tau^2 of a set function; reports attached when tau is not an extended metric."""
    result = checked_tau_squared(load_set_function(tau_path), config.tolerance(), config)
    return result, result.passed


@construct.command("to-g")
@click.option("--tau", "tau_path", type=click.Path(), required=True, help="Set function")
@reported
def construct_to_g(config: BalkConfig, tau_path: str) -> Outcome:
    """G table G(x, y, z) = tau(Im(x, y, z)); reports attached when tau is not increasing."""
    result = checked_balk_to_g(load_set_function(tau_path), config.tolerance(), config)
    return result, result.passed


@construct.command("from-g")
@click.option("--g", "g_path", type=click.Path(), required=True, help="Symmetric G table")
@reported
def construct_from_g(config: BalkConfig, g_path: str) -> Outcome:
    """Increasing extended metric of a symmetric G-metric."""
    return g_to_balk(load_g_table(g_path), config.tolerance(), config), True


@construct.command("extend")
@click.option("--partial", "partial_path", type=click.Path(), required=True, help="Partial table with k_cap")
@reported
def construct_extend(config: BalkConfig, partial_path: str) -> Outcome:
    """Max extension of a bounded-cardinality table."""
    return extend_partial(load_partial(partial_path), config.tolerance(), config), True


@construct.command("stepped")
@click.option("--n", type=int, required=True, help="Universe size, at least k + 2")
@click.option("--k", type=int, required=True, help="Last cardinality with its own step, at least 2")
@click.option("--t", "steps", type=float, multiple=True, help="Step values t_2..t_{k+1} (repeat the flag)")
@reported
def construct_stepped(config: BalkConfig, n: int, k: int, steps: Tuple[float, ...]) -> Outcome:
    """Cardinality-stepped extended metric that is k- but not (k+1)-increasing."""
    return stepped_cardinality_metric(n, k, list(steps) or None), True


construct.add_command(construct_stepped, name="example25")


@construct.command("random-metric")
@click.option("--n", type=int, required=True, help="Number of points")
@reported
def construct_random_metric(config: BalkConfig, n: int) -> Outcome:
    """Seeded Euclidean metric on n random points."""
    return random_metric(n, config.seed), True


@construct.command("g-from-metric")
@click.option("--metric", "metric_path", type=click.Path(), required=True, help="Metric table")
@reported
def construct_g_from_metric(config: BalkConfig, metric_path: str) -> Outcome:
    """Max-pairwise G-metric of a metric."""
    return max_pairwise_g(load_metric(metric_path)), True


@construct.command("perturbed-g")
@click.option("--metric", "metric_path", type=click.Path(), required=True, help="Metric table")
@click.option("--strength", type=float, default=0.25, help="Largest relative raise of a distinct triple")
@reported
def construct_perturbed_g(config: BalkConfig, metric_path: str, strength: float) -> Outcome:
    """Randomly raised max-pairwise G table that still passes the symmetric G check."""
    d = load_metric(metric_path)
    return perturbed_symmetric_g(d, config.seed, strength, tol=config.tolerance(), config=config), True


# ============================================================================
# diam
# ============================================================================

@cli.command()
@click.option("--tau", "tau_path", type=click.Path(), required=True, help="Set function")
@click.option("--k", type=int, required=True, help="Largest subset size taken into account")
@click.option("--set", "subset", default=None, help="Canonical subset key, e.g. a,b,c")
@click.option("--all", "all_sets", is_flag=True, help="Every subset, as a set function")
@reported
def diam(config: BalkConfig, tau_path: str, k: int, subset: Optional[str], all_sets: bool) -> Outcome:
    """Generalized diameter max{tau(B) : B in A, |B| <= k}."""
    tau = load_set_function(tau_path)
    if all_sets:
        return generalized_diameter_table(tau, k), True
    if subset is None:
        raise InputError("pass --set KEY or --all")
    mask = parse_subset_key(subset, tau.universe)
    value = generalized_diameter(tau, k, mask)
    return {"k": k, "set": canonical_subset_key(mask, tau.universe), "value": value}, True


# ============================================================================
# verify
# ============================================================================

@cli.command()
@click.argument(
    "statement",
    type=click.Choice(["k-diameter", "pair-generated", "triple-generated", "chain-bound", "half-pair-bound"])
)
@click.option("--tau", "tau_path", type=click.Path(), required=True, help="Extended metric")
@click.option("--k", type=int, default=None, help="Arity for k-diameter")
@reported
def verify(config: BalkConfig, statement: str, tau_path: str, k: Optional[int]) -> Outcome:
    """Evaluate an equivalence clause by clause, or an inequality bound."""
    tau = load_set_function(tau_path)
    tol = config.tolerance()
    if statement == "k-diameter":
        if k is None:
            raise InputError("--k is required for k-diameter")
        report = verify_k_diameter_equivalence(tau, k, tol, config)
    elif statement == "pair-generated":
        report = verify_pair_generated_equivalence(tau, tol, config)
    elif statement == "triple-generated":
        report = verify_triple_generated_equivalence(tau, tol, config)
    elif statement == "chain-bound":
        report = verify_chain_bound(tau, tol, config)
    else:
        report = verify_half_pair_bound(tau, tol, config)
    return report, _passed(report)


# ============================================================================
# pretangent
# ============================================================================

def tau_rule_options(fn: Callable) -> Callable:
    fn = click.option("--e", "exponent", type=float, default=1.0, help="Exponent of the perturbation")(fn)
    fn = click.option("--c", "coefficient", type=float, default=1.0, help="Coefficient of the perturbation")(fn)
    fn = click.option(
        "--tau-rule",
        type=click.Choice([k.value for k in TauRuleKind]),
        default=None,
        help="Set function on the ambient (default: the scenario's rule, else diameter)"
    )(fn)
    return fn


def _rule_spec(pipeline: PretangentPipeline, tau_rule: Optional[str], c: float, e: float) -> Optional[TauRuleSpec]:
    if tau_rule is None:
        return None
    if tau_rule == TauRuleKind.EXPLICIT.value:
        spec = pipeline.scenario.tau_rule
        if spec is None or spec.kind != TauRuleKind.EXPLICIT:
            raise InputError("--tau-rule explicit needs explicit values in the scenario's tau_rule")
        return spec
    return TauRuleSpec(kind=tau_rule, c=c, e=e)


@cli.group()
def pretangent():
    """Pretangent spaces of a scenario and lifted extended metrics."""
    pass


@pretangent.command("build")
@click.option("--scenario", "scenario_path", type=click.Path(), required=True, help="Scenario file")
@reported
def pretangent_build(config: BalkConfig, scenario_path: str) -> Outcome:
    """Self-stable family, classes and rho."""
    pipeline = PretangentPipeline(load_scenario(scenario_path), config)
    return pipeline.build().report(), True


@pretangent.command("lift")
@click.option("--scenario", "scenario_path", type=click.Path(), required=True, help="Scenario file")
@click.option("--set", "classes", default="all", help="Comma-separated class labels, or 'all'")
@click.option("--all-subsets", is_flag=True, help="Lift every nonempty set of classes")
@tau_rule_options
@reported
def pretangent_lift(config: BalkConfig, scenario_path: str, classes: str, all_subsets: bool,
                    tau_rule: Optional[str], coefficient: float, exponent: float) -> Outcome:
    """Lifted extended metric on a set of classes."""
    pipeline = PretangentPipeline(load_scenario(scenario_path), config)
    rule = pipeline.rule(_rule_spec(pipeline, tau_rule, coefficient, exponent))
    if all_subsets:
        return pipeline.lift_all(rule), True
    labels = [] if classes == "all" else [label for label in classes.split(",") if label]
    value = pipeline.lift(labels, rule)
    return {"classes": labels or pipeline.build().labels, "value": value}, True


@pretangent.command("generated")
@click.option("--scenario", "scenario_path", type=click.Path(), required=True, help="Scenario file")
@tau_rule_options
@reported
def pretangent_generated(config: BalkConfig, scenario_path: str, tau_rule: Optional[str],
                         coefficient: float, exponent: float) -> Outcome:
    """Is the rule generated by the ambient metric at p on the scenario's families?"""
    pipeline = PretangentPipeline(load_scenario(scenario_path), config)
    report = pipeline.generated(pipeline.rule(_rule_spec(pipeline, tau_rule, coefficient, exponent)))
    return report, report.passed


@pretangent.command("ultra-criterion")
@click.option("--scenario", "scenario_path", type=click.Path(), required=True, help="Scenario file")
@click.option("--with-generated", is_flag=True, help="Pair with the generated-at-point check of the rule")
@tau_rule_options
@reported
def pretangent_ultra_criterion(config: BalkConfig, scenario_path: str, with_generated: bool,
                               tau_rule: Optional[str], coefficient: float, exponent: float) -> Outcome:
    """Infinitesimal ultrametricity criterion on the scenario's triples."""
    pipeline = PretangentPipeline(load_scenario(scenario_path), config)
    if with_generated:
        combined = pipeline.ultrametric_generation(
            pipeline.rule(_rule_spec(pipeline, tau_rule, coefficient, exponent))
        )
        return combined, combined.passed
    report = pipeline.ultra_criterion()
    return report, report.passed


def main() -> None:
    cli(obj={})


if __name__ == "__main__":
    main()
