"""
Tests for pretangent families, quotients, lifts and the point criteria.

Most scenarios live on the real line at p = 0 with r_m = 1/m, where every
limit is known in closed form.
"""

from itertools import permutations

import numpy as np
import pytest

from balk_metrics.axioms import check_balk
from balk_metrics.config import BalkConfig, Verdict
from balk_metrics.construct import max_pair_table
from balk_metrics.core.bitsets import mask_members
from balk_metrics.exceptions import InputError, PretangentError
from balk_metrics.pretangent import (
    CallbackRule,
    DiameterRule,
    EuclideanSpace,
    LimitSelector,
    NormalizingSequence,
    OracleSpace,
    PerturbedDiameterRule,
    PointSequence,
    PretangentPipeline,
    PretangentScenario,
    StabilityStatus,
    build_self_stable,
    generated_at_point,
    lift_balk,
    lift_set_function,
    mutual_stability,
    quotient,
    ultrametric_criterion,
)
from balk_metrics.pretangent.scenario import MARKED_LABEL, SequenceSpec
from balk_metrics.pretangent.space import is_single_point
from balk_metrics.pretangent.stability import converges_to_marked, tail_estimate, vanishes
from balk_metrics.pretangent.ultrametric import criterion_product, pair_weight

from .conftest import linear_scenario


def _pipeline(document, config=None):
    return PretangentPipeline(PretangentScenario.model_validate(document), config or BalkConfig())


@pytest.fixture
def line():
    return EuclideanSpace([0.0])


@pytest.fixture
def r_line():
    return NormalizingSequence.power(10_000, a=1.0)


def _linear(label, a, space, r):
    return PointSequence.from_spec(SequenceSpec(label=label, form="linear", v=[a]), space, r)


# ============================================================================
# Scenario materialization
# ============================================================================

class TestScenario:
    """Tests for scenario parsing and sequence materialization."""

    def test_alias_and_defaults(self, linear3):
        assert linear3.prefix == 10_000
        assert linear3.selector.mode.value == "ordinary"
        assert [s.label for s in linear3.sequences] == ["x1", "x2.5", "x4"]

    def test_reserved_label_rejected(self):
        with pytest.raises(ValueError):
            SequenceSpec(label=MARKED_LABEL, form="constant")

    def test_unknown_key_rejected(self, linear3_document):
        linear3_document["extra"] = 1
        with pytest.raises(ValueError):
            PretangentScenario.model_validate(linear3_document)

    def test_normalizing_must_be_positive(self):
        with pytest.raises(InputError, match="r_3"):
            NormalizingSequence([1, 0.5, 0, 0.2, 0.1, 0.05, 0.01, 0.001])

    def test_selector_keeps_enough_indices(self):
        with pytest.raises(InputError, match="at least"):
            LimitSelector.subsequence(0, 5).indices(100)
        assert LimitSelector.subsequence(1, 2).indices(8).tolist() == [0, 2, 4, 6]

    def test_alternating_form(self, line, r_line):
        spec = SequenceSpec(label="alt", form="alternating", v=[1.0], w=[3.0])
        seq = PointSequence.from_spec(spec, line, r_line)
        assert seq.points[0, 0] == pytest.approx(3.0)
        assert seq.points[1, 0] == pytest.approx(0.5)

    def test_dimension_mismatch(self, r_line):
        space = EuclideanSpace([0.0, 0.0])
        with pytest.raises(InputError, match="coordinates"):
            _linear("x", 1.0, space, r_line)


# ============================================================================
# Stability
# ============================================================================

class TestStability:
    """Tests for tail estimates and mutual stability."""

    def test_linear_pair_is_exact(self, line, r_line):
        """Test that a/m and b/m have rescaled distance |a - b|."""
        verdict = mutual_stability(_linear("a", 1.0, line, r_line), _linear("b", 2.5, line, r_line),
                                   r_line, LimitSelector.ordinary(), 1e-6)
        assert verdict.stable
        assert abs(verdict.limit - 1.5) <= 1e-9

    def test_oscillation_depends_on_selector(self, line, r_line):
        """Test (1 + (-1)^m) / m against p~ on three selectors."""
        alt = PointSequence.from_spec(SequenceSpec(label="alt", form="alternating", v=[2.0], w=[0.0]), line, r_line)
        marked = PointSequence.marked(line, r_line.prefix)

        ordinary = mutual_stability(alt, marked, r_line, LimitSelector.ordinary(), 1e-6)
        assert ordinary.status == StabilityStatus.UNSTABLE
        assert ordinary.tail_spread == pytest.approx(2.0)

        even = mutual_stability(alt, marked, r_line, LimitSelector.subsequence(0, 2), 1e-6)
        assert even.stable
        assert abs(even.limit - 2.0) <= 1e-12
        odd = mutual_stability(alt, marked, r_line, LimitSelector.subsequence(1, 2), 1e-6)
        assert odd.stable
        assert abs(odd.limit) <= 1e-12

    def test_settling_tail_is_extrapolated(self):
        """Test that 1 + 1/m is stable with limit 1 although its tail still moves."""
        m = np.arange(1, 10_001, dtype=float)
        verdict = tail_estimate(1 + 1 / m, LimitSelector.ordinary(), 1e-6)
        assert verdict.stable
        assert verdict.extrapolated
        assert abs(verdict.limit - 1.0) <= 1e-9
        assert verdict.tail_spread > 1e-6

    def test_slow_growth_is_not_extrapolated(self):
        m = np.arange(1, 10_001, dtype=float)
        verdict = tail_estimate(np.sqrt(m), LimitSelector.ordinary(), 1e-6)
        assert verdict.status == StabilityStatus.UNSTABLE
        assert not verdict.extrapolated

    def test_inconclusive_band(self):
        values = np.concatenate([np.zeros(75), np.linspace(0, 2e-6, 25)])
        verdict = tail_estimate(values, LimitSelector.ordinary(), 1e-6)
        assert verdict.status == StabilityStatus.INCONCLUSIVE
        assert verdict.limit is None

    def test_non_finite_tail_is_unstable(self):
        values = np.ones(16)
        values[-1] = np.inf
        assert tail_estimate(values, LimitSelector.ordinary(), 1e-6).status == StabilityStatus.UNSTABLE

    def test_vanishes(self):
        m = np.arange(1, 1001, dtype=float)
        assert vanishes(1 / m, LimitSelector.ordinary(), 1e-6)[0]
        passed, estimate = vanishes(np.full(1000, 0.125), LimitSelector.ordinary(), 1e-6)
        assert not passed
        assert estimate == pytest.approx(0.125)

    def test_early_transient_does_not_vanish(self):
        """Test that 0.5 + 1000/m is judged on its limit 0.5, not on its decay from m = 1."""
        m = np.arange(1, 10_001, dtype=float)
        passed, estimate = vanishes(0.5 + 1000 / m, LimitSelector.ordinary(), 1e-6)
        assert not passed
        assert estimate == pytest.approx(0.5, abs=1e-9)

    def test_oscillating_tail_does_not_vanish(self):
        m = np.arange(1, 10_001, dtype=float)
        assert not vanishes(1 / m + 1e-3 * (m % 2), LimitSelector.ordinary(), 1e-6)[0]

    def test_membership(self, line, r_line):
        assert converges_to_marked(_linear("a", 2.0, line, r_line), 0.5)[0]
        static = PointSequence("s", line, np.ones((100, 1)))
        ok, reason = converges_to_marked(static, 0.5)
        assert not ok
        assert "does not decay" in reason

    def test_different_ambients_rejected(self, r_line):
        x = _linear("a", 1.0, EuclideanSpace([0.0]), r_line)
        y = _linear("b", 1.0, EuclideanSpace([0.0]), r_line)
        with pytest.raises(InputError, match="different ambient"):
            mutual_stability(x, y, r_line, LimitSelector.ordinary(), 1e-6)


# ============================================================================
# Families and quotients
# ============================================================================

class TestPretangentSpace:
    """Tests for the family build and the metric quotient."""

    def test_linear_space(self, linear3):
        """Test classes and rho for a/m with a in {1, 2.5, 4}."""
        space = PretangentPipeline(linear3, BalkConfig()).build()
        assert space.labels == [MARKED_LABEL, "x1", "x2.5", "x4"]
        expected = np.abs(np.subtract.outer([0, 1, 2.5, 4], [0, 1, 2.5, 4]))
        assert np.max(np.abs(space.rho - expected)) <= 1e-9
        assert space.rejected == []

    def test_root_decay_rejected(self, line, r_line):
        """Test that 1/sqrt(m) is not mutually stable with p~ at r_m = 1/m."""
        slow = PointSequence.from_spec(SequenceSpec(label="slow", form="power", v=[1.0], beta=0.5), line, r_line)
        family, rejected = build_self_stable([slow, _linear("x1", 1.0, line, r_line)], r_line,
                                             LimitSelector.ordinary(), 1e-6)
        assert [seq.label for seq in family] == [MARKED_LABEL, "x1"]
        assert rejected[0].label == "slow"
        assert MARKED_LABEL in rejected[0].reason

    def test_static_sequence_rejected(self, line, r_line):
        static = PointSequence("far", line, np.ones((r_line.prefix, 1)))
        _, rejected = build_self_stable([static], r_line, LimitSelector.ordinary(), 1e-6)
        assert rejected[0].label == "far"

    def test_class_sharing(self):
        """Test that 1/m + 1/m^2 joins the class of 1/m at the default tolerance."""
        document = linear_scenario([1.0, 3.0])
        del document["tolerance"]
        document["sequences"].append({"label": "bent", "form": "analytic", "v": [1.0], "w": [1.0], "alpha": 2.0})
        space = _pipeline(document).build()
        assert space.tol == BalkConfig().pretangent_tolerance
        assert space.labels == [MARKED_LABEL, "x1", "x3"]
        assert space.classes[1].members == ["x1", "bent"]
        assert space.class_index("bent") == 1
        assert space.rejected == []
        assert np.max(np.abs(space.rho - np.abs(np.subtract.outer([0, 1, 3], [0, 1, 3])))) <= 1e-9

    def test_zero_sequence_joins_marked_class(self):
        space = _pipeline(linear_scenario([0.0, 1.0])).build()
        assert space.classes[0].members == [MARKED_LABEL, "x0"]

    def test_single_point(self, tabulated_ultra_document):
        space = _pipeline(tabulated_ultra_document).build()
        assert is_single_point(space)
        assert space.size == 1

    def test_inconclusive_aborts(self, line, r_line):
        """Test that a pair inside the tolerance band aborts the build."""
        m = np.arange(1, r_line.prefix + 1, dtype=float)
        drift = 1 / m + 2e-6 / m * (m > 7_500) * (m - 7_500) / 2_500
        seq = PointSequence("drift", line, drift[:, None])
        with pytest.raises(PretangentError) as excinfo:
            build_self_stable([seq], r_line, LimitSelector.ordinary(), 1e-6)
        assert excinfo.value.diagnostic["pair"] == ["drift", MARKED_LABEL]

    def test_quotient_rejects_unstable_family(self, line, r_line):
        alt = PointSequence.from_spec(SequenceSpec(label="alt", form="alternating", v=[1.0], w=[3.0]), line, r_line)
        with pytest.raises(PretangentError, match="not self-stable"):
            quotient([PointSequence.marked(line, r_line.prefix), alt], r_line, LimitSelector.ordinary(), 1e-6)

    def test_report(self, linear3):
        report = PretangentPipeline(linear3, BalkConfig()).build().report()
        assert report.provenance["M"] == 10_000
        assert report.provenance["selector"] == "ordinary"
        assert len(report.verdicts) == 6


# ============================================================================
# Lifting
# ============================================================================

class TestLifting:
    """Tests for X_tau on pretangent classes."""

    def test_pair_lift_matches_rho(self, linear3):
        pipeline = PretangentPipeline(linear3, BalkConfig())
        space = pipeline.build()
        assert pipeline.lift(["x1", "x4"]) == pytest.approx(space.rho[1, 3])
        assert pipeline.lift(["x2.5"]) == 0.0

    def test_full_lift(self, linear3):
        assert PretangentPipeline(linear3, BalkConfig()).lift([]) == pytest.approx(4.0)

    def test_lifted_set_function_is_extended_metric(self, linear3):
        """Test that the lifted diameter satisfies the axioms on the classes."""
        tau = PretangentPipeline(linear3, BalkConfig()).lift_all()
        assert tau.n == 4
        assert check_balk(tau).passed

    def test_perturbed_rule_lift(self, linear3):
        """Test the lift of diam + c * reach^e with e = 1 on three classes."""
        pipeline = PretangentPipeline(linear3, BalkConfig())
        value = pipeline.lift(["x1", "x2.5", "x4"], PerturbedDiameterRule(c=0.5, e=1.0))
        assert value == pytest.approx(3.0 + 0.5 * 4.0)

    def test_unknown_class(self, linear3):
        with pytest.raises(InputError, match="unknown class"):
            PretangentPipeline(linear3, BalkConfig()).lift(["x9"])

    def test_non_convergent_lift(self, linear3):
        """Test that a rule without a rescaled limit aborts."""
        space = PretangentPipeline(linear3, BalkConfig()).build()
        m = np.arange(1, 10_001)

        class Oscillating(DiameterRule):
            def evaluate(self, space, columns):
                return super().evaluate(space, columns) * (1 + (m % 2))

        with pytest.raises(PretangentError) as excinfo:
            lift_balk(Oscillating(), space, ["x1", "x4"])
        assert excinfo.value.diagnostic["classes"] == ["x1", "x4"]

    def test_callback_rule(self, linear3):
        """Test a Python callable on the distinct points of each index."""
        space = PretangentPipeline(linear3, BalkConfig()).build()
        rule = CallbackRule(lambda points: float(np.ptp(np.concatenate(points))))
        assert lift_balk(rule, space, ["x1", "x4"]) == pytest.approx(3.0)
        assert lift_set_function(DiameterRule(), space).evaluate(0b1111) == pytest.approx(4.0)



def _plane_scenario():
    """Plane at p = 0 with r_m = 1/m and four straight-line sequences."""
    directions = {"e1": [1.0, 0.0], "e2": [0.0, 1.0], "diag": [1.0, 1.0], "far": [2.0, -1.0]}
    return {
        "ambient": {"kind": "euclidean", "dim": 2, "p": [0.0, 0.0]},
        "normalizing": {"form": "power", "c": 1.0, "a": 1.0},
        "M": 10_000,
        "sequences": [{"label": label, "form": "linear", "v": v} for label, v in directions.items()],
    }


@pytest.fixture(params=["line", "plane"])
def five_class_pipeline(request):
    document = linear_scenario([0.5, 1.0, 2.5, 4.0]) if request.param == "line" else _plane_scenario()
    return _pipeline(document)


class TestLiftProperties:
    """Properties of diameter lifts on five-class spaces."""

    def test_generated_diameter_lifts_to_pair_maxima(self, five_class_pipeline):
        """Test that every class subset lifts to the max of rho over its pairs."""
        assert five_class_pipeline.generated(DiameterRule()).passed
        space = five_class_pipeline.build()
        assert space.size == 5
        lifted = five_class_pipeline.lift_all(DiameterRule())
        expected = max_pair_table(space.rho)[1:]
        assert np.max(np.abs(lifted.values - expected)) <= 10 * space.tol

    def test_chain_bound_transfers(self, five_class_pipeline):
        """Test lift(A) <= sum of rho along every ordering of A."""
        space = five_class_pipeline.build()
        lifted = five_class_pipeline.lift_all(DiameterRule())
        for mask in range(1, 1 << space.size):
            members = mask_members(mask)
            for order in permutations(members):
                chain = sum(space.rho[a, b] for a, b in zip(order, order[1:]))
                assert lifted.evaluate(mask) <= chain + 10 * space.tol

    def test_half_pair_bound_transfers(self, five_class_pipeline):
        """Test lift(A) >= half the largest rho inside A."""
        space = five_class_pipeline.build()
        lifted = five_class_pipeline.lift_all(DiameterRule())
        half = 0.5 * max_pair_table(space.rho)
        for mask in range(1, 1 << space.size):
            assert lifted.evaluate(mask) >= half[mask] - 10 * space.tol

# ============================================================================
# Point criteria
# ============================================================================

class TestGeneratedAtPoint:
    """Tests for the generated-at-point check."""

    def test_diameter_passes(self, linear3):
        report = PretangentPipeline(linear3, BalkConfig()).generated(DiameterRule())
        assert report.verdict == Verdict.PASS
        assert report.notes

    def test_quadratic_perturbation_passes(self, linear3):
        report = PretangentPipeline(linear3, BalkConfig()).generated(PerturbedDiameterRule(c=1.0, e=2.0))
        assert report.passed

    def test_linear_perturbation_fails(self, linear3):
        """Test that a bump of order d(x, p) does not vanish relative to it."""
        report = PretangentPipeline(linear3, BalkConfig()).generated(PerturbedDiameterRule(c=0.5, e=1.0))
        assert report.verdict == Verdict.FAIL
        assert report.witness.condition == "vanishing-ratio"
        assert report.witness.points == ["x1", "x2.5", "x4"]
        assert report.witness.lhs == pytest.approx(0.5)

    def test_non_member_rejected(self, line, r_line):
        static = PointSequence("far", line, np.ones((r_line.prefix, 1)))
        with pytest.raises(InputError, match="does not converge"):
            generated_at_point(DiameterRule(), [[static]])

    def test_large_transient_with_nonzero_limit_fails(self, line, r_line):
        """Test diam + 0.5 * reach + 1000 * reach^2: the ratio falls from ~3000 but tends to 0.5."""
        def tau(points):
            coords = np.concatenate(points)
            reach = float(np.abs(coords).max())
            return float(np.ptp(coords)) + 0.5 * reach + 1000 * reach ** 2

        family = [_linear("x1", 1.0, line, r_line), _linear("x3", 3.0, line, r_line)]
        report = generated_at_point(CallbackRule(tau), [family])
        assert report.verdict == Verdict.FAIL
        assert report.witness.lhs == pytest.approx(0.5, abs=1e-6)


class TestUltrametricCriterion:
    """Tests for the infinitesimal ultrametricity criterion."""

    def test_pair_weight_at_marked_point(self):
        assert pair_weight(np.array([0.0]), np.array([0.0]), np.array([0.0])).tolist() == [0.0]

    def test_real_line_triple_fails(self, real_line_triple_document):
        """Test t, 2t, 4t: the product stays at 1/8."""
        report = _pipeline(real_line_triple_document).ultra_criterion()
        assert report.verdict == Verdict.FAIL
        assert report.witness.condition == "ultrametric-product"
        assert report.witness.lhs >= 3 / 32 - 1e-6
        assert report.witness.lhs == pytest.approx(0.125)

    def test_product_values(self, line, r_line):
        x, y, z = (_linear(label, a, line, r_line) for label, a in (("x", 1.0), ("y", 2.0), ("z", 4.0)))
        product = criterion_product(line, x.points, y.points, z.points)
        assert np.allclose(product, 0.125)

    def test_tabulated_ultrametric_passes(self, tabulated_ultra_document):
        assert _pipeline(tabulated_ultra_document).ultra_criterion().passed

    def test_no_triples(self, linear3):
        with pytest.raises(InputError, match="no triples"):
            PretangentPipeline(linear3, BalkConfig()).ultra_criterion()

    def test_generation_report(self, real_line_triple_document):
        report = _pipeline(real_line_triple_document).ultrametric_generation(DiameterRule())
        assert report.generated.passed
        assert not report.ultrametric.passed
        assert report.conclusion == "refuted"

    def test_foreign_ambient_rejected(self, line, r_line):
        triple = tuple(_linear(label, a, line, r_line) for label, a in (("x", 1.0), ("y", 2.0), ("z", 4.0)))
        with pytest.raises(InputError, match="different ambient"):
            ultrametric_criterion(EuclideanSpace([0.0]), [triple])


class TestOracleAmbient:
    """Tests for callback ambients."""

    def test_spot_check_passes_for_absolute_value(self, linear3):
        space = OracleSpace(lambda x, y: abs(x - y), 0.0)
        pipeline = PretangentPipeline(
            linear3.model_copy(update={"sequences": [], "prefix": 64}), BalkConfig(), ambient=space
        )
        assert pipeline.build().size == 1

    def test_spot_check_rejects_asymmetric_distance(self):
        space = OracleSpace(lambda x, y: max(x - y, 0.0) * 2 + max(y - x, 0.0), 0.0)
        seq = PointSequence("x", space, space.coerce_points([1.0 / m for m in range(1, 65)], "x"))
        with pytest.raises(InputError):
            space.spot_check([seq], 256, 0, BalkConfig().tolerance())


@pytest.mark.slow
class TestAcceptance:
    """End-to-end runs at the full default prefix."""

    def test_linear_four_classes(self):
        """Test a in {0, 1, 2.5, 4}: p~ absorbs 0 and rho is the line metric."""
        space = _pipeline(linear_scenario([0.0, 1.0, 2.5, 4.0])).build()
        assert space.labels == [MARKED_LABEL, "x1", "x2.5", "x4"]
        assert np.max(np.abs(space.rho - np.abs(np.subtract.outer([0, 1, 2.5, 4], [0, 1, 2.5, 4])))) <= 1e-9

    def test_linear_four_class_lifts(self):
        """Test the diameter lift on all 15 class subsets against max |a - b|."""
        pipeline = _pipeline(linear_scenario([0.0, 1.0, 2.5, 4.0]))
        lifted = pipeline.lift_all(DiameterRule())
        coefficients = np.array([0.0, 1.0, 2.5, 4.0])
        expected = max_pair_table(np.abs(np.subtract.outer(coefficients, coefficients)))
        assert lifted.n == 4
        assert np.max(np.abs(lifted.values - expected[1:])) <= 1e-9
