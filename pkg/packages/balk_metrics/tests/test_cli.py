"""
Tests for the command-line interface and its exit codes.
"""

import json

import pytest
from click.testing import CliRunner

from balk_metrics.cli import cli, render_text

pytestmark = pytest.mark.integration


@pytest.fixture
def runner():
    return CliRunner()


def _run(runner, *args):
    return runner.invoke(cli, list(args), obj={})


def _report(result):
    return json.loads(result.stdout)


class TestCheckCommand:
    """Tests for `check`."""

    def test_pass_exits_zero(self, runner, write_json, diam_tau):
        path = write_json("tau.json", diam_tau)
        result = _run(runner, "check", "--kind", "balk", "--input", str(path))
        assert result.exit_code == 0
        assert _report(result)["verdict"] == "pass"

    def test_fail_exits_one(self, runner, write_json, sum_tau):
        path = write_json("tau.json", sum_tau)
        result = _run(runner, "check", "--kind", "balk", "--input", str(path))
        assert result.exit_code == 1
        assert _report(result)["witness"]["condition"] == "triangle"

    def test_k_required(self, runner, write_json, diam_tau):
        path = write_json("tau.json", diam_tau)
        result = _run(runner, "check", "--kind", "k-increasing", "--input", str(path))
        assert result.exit_code == 2
        assert "--k is required" in result.output

    def test_malformed_file_exits_two(self, runner, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")
        result = _run(runner, "check", "--kind", "metric", "--input", str(path))
        assert result.exit_code == 2
        assert "broken.json:1:" in result.output

    def test_output_file(self, runner, write_json, line_metric, tmp_path):
        out = tmp_path / "reports" / "metric.json"
        path = write_json("d.json", line_metric)
        result = _run(runner, "check", "--kind", "metric", "--input", str(path), "--output", str(out))
        assert result.exit_code == 0
        assert json.loads(out.read_text())["check"] == "metric"

    def test_text_format(self, runner, write_json, diam_tau):
        path = write_json("tau.json", diam_tau)
        result = _run(runner, "--format", "text", "check", "--kind", "increasing", "--input", str(path))
        assert result.exit_code == 0
        assert any(line.startswith("verdict") and line.endswith("pass") for line in result.stdout.splitlines())


class TestConstructCommands:
    """Tests for the `construct` group."""

    def test_stepped(self, runner):
        result = _run(runner, "construct", "stepped", "--n", "4", "--k", "2")
        assert result.exit_code == 0
        assert _report(result)["values"]["x0,x1,x2"] == 1.5

    def test_example_alias_rejects_small_n(self, runner):
        """Test n = 3, k = 2, which is below k + 2."""
        result = _run(runner, "construct", "example25", "--n", "3", "--k", "2")
        assert result.exit_code == 2
        assert "n must be at least" in result.output

    def test_diam_then_check(self, runner, write_json, line_metric, tmp_path):
        out = tmp_path / "tau.json"
        path = write_json("d.json", line_metric)
        assert _run(runner, "construct", "diam", "--metric", str(path), "--out", str(out)).exit_code == 0
        result = _run(runner, "check", "--kind", "ultra", "--input", str(out))
        assert result.exit_code == 1

    def test_random_metric_uses_seed(self, runner):
        first = _run(runner, "--seed", "5", "construct", "random-metric", "--n", "4")
        second = _run(runner, "--seed", "5", "construct", "random-metric", "--n", "4")
        assert first.exit_code == 0
        assert first.stdout == second.stdout

    def test_extension_failure_writes_report(self, runner, write_json):
        path = write_json("pt.json", {
            "universe": ["a", "b", "c"],
            "k_cap": 2,
            "values": {"a": 0, "b": 0, "a,b": 1, "c": 0, "a,c": 5, "b,c": 1},
        })
        result = _run(runner, "construct", "extend", "--partial", str(path))
        assert result.exit_code == 1
        assert _report(result)["witness"]["condition"] == "restricted-triangle"

    def test_g_round_trip(self, runner, write_json, g_table, tmp_path):
        path = write_json("g.json", g_table)
        tau = tmp_path / "tau.json"
        assert _run(runner, "construct", "from-g", "--g", str(path), "--out", str(tau)).exit_code == 0
        result = _run(runner, "construct", "to-g", "--tau", str(tau))
        assert result.exit_code == 0
        assert result.stdout == path.read_text()

    def test_tau2_of_extended_metric_is_bare_table(self, runner, write_json, diam_tau):
        path = write_json("tau.json", diam_tau)
        result = _run(runner, "construct", "tau2", "--tau", str(path))
        assert result.exit_code == 0
        assert _report(result)["dist"] == [[0, 1, 3], [1, 0, 2], [3, 2, 0]]

    def test_tau2_reports_failed_input(self, runner, write_json):
        """Test that a non-extended-metric input surfaces both verdicts."""
        path = write_json("tau.json", {
            "universe": ["a", "b", "c"],
            "values": {"a": 0, "b": 0, "c": 0, "a,b": 1, "a,c": 1, "b,c": 5, "a,b,c": 5},
        })
        result = _run(runner, "construct", "tau2", "--tau", str(path))
        assert result.exit_code == 1
        document = _report(result)
        assert document["precondition"]["check"] == "balk"
        assert document["precondition"]["verdict"] == "fail"
        assert document["check"]["check"] == "metric"
        assert document["check"]["witness"]["condition"] == "triangle"
        assert document["table"]["dist"][1][2] == 5

    def test_to_g_reports_failing_g_verdict(self, runner, write_json):
        path = write_json("tau.json", {
            "universe": ["a", "b", "c"],
            "values": {"a": 0, "b": 0, "c": 0, "a,b": 2, "a,c": 1, "b,c": 1, "a,b,c": 1},
        })
        result = _run(runner, "construct", "to-g", "--tau", str(path))
        assert result.exit_code == 1
        document = _report(result)
        assert document["precondition"]["witness"]["condition"] == "monotone"
        assert document["check"]["check"] == "g"
        assert document["check"]["verdict"] == "fail"
        assert document["check"]["witness"]["condition"] == "iii"
        assert document["table"]["values"]["a,b,c"] == 1

    def test_to_g_void_guarantee_passing_check(self, runner, write_json, stepped_5_2):
        """Test that a non-increasing input is flagged even when its G table passes."""
        path = write_json("tau.json", stepped_5_2)
        result = _run(runner, "construct", "to-g", "--tau", str(path))
        assert result.exit_code == 0
        document = _report(result)
        assert document["precondition"]["verdict"] == "fail"
        assert document["check"]["verdict"] == "pass"


class TestDiamAndVerify:
    """Tests for `diam` and `verify`."""

    def test_diam_single_set(self, runner, write_json, stepped_5_2):
        path = write_json("tau.json", stepped_5_2)
        result = _run(runner, "diam", "--tau", str(path), "--k", "2", "--set", "x0,x1,x2")
        assert result.exit_code == 0
        assert _report(result)["value"] == 1.25

    def test_diam_needs_a_set(self, runner, write_json, stepped_5_2):
        path = write_json("tau.json", stepped_5_2)
        assert _run(runner, "diam", "--tau", str(path), "--k", "2").exit_code == 2

    def test_verify_agreement(self, runner, write_json, stepped_5_2):
        """Test that failing clauses in agreement still exit 0."""
        path = write_json("tau.json", stepped_5_2)
        result = _run(runner, "verify", "k-diameter", "--tau", str(path), "--k", "2")
        assert result.exit_code == 0
        report = _report(result)
        assert report["agree"] is True
        assert {clause["verdict"] for clause in report["clauses"]} == {"fail"}

    def test_verify_rejects_non_extended_metric(self, runner, write_json, sum_tau):
        path = write_json("tau.json", sum_tau)
        assert _run(runner, "verify", "half-pair-bound", "--tau", str(path)).exit_code == 2


class TestPretangentCommands:
    """Tests for the `pretangent` group."""

    def test_build(self, runner, write_json, linear3_document):
        path = write_json("scenario.json", linear3_document)
        result = _run(runner, "pretangent", "build", "--scenario", str(path))
        assert result.exit_code == 0
        assert [c["label"] for c in _report(result)["classes"]] == ["~p", "x1", "x2.5", "x4"]

    def test_lift(self, runner, write_json, linear3_document):
        path = write_json("scenario.json", linear3_document)
        result = _run(runner, "pretangent", "lift", "--scenario", str(path), "--set", "x1,x4")
        assert result.exit_code == 0
        assert _report(result)["value"] == pytest.approx(3.0)

    def test_generated_refuted(self, runner, write_json, linear3_document):
        path = write_json("scenario.json", linear3_document)
        result = _run(runner, "pretangent", "generated", "--scenario", str(path),
                      "--tau-rule", "diameter-perturbed", "--c", "0.5", "--e", "1")
        assert result.exit_code == 1
        assert _report(result)["witness"]["condition"] == "vanishing-ratio"

    def test_ultra_criterion(self, runner, write_json, real_line_triple_document):
        path = write_json("scenario.json", real_line_triple_document)
        result = _run(runner, "pretangent", "ultra-criterion", "--scenario", str(path), "--with-generated")
        assert result.exit_code == 1
        assert _report(result)["conclusion"] == "refuted"

    def test_unstable_lift_reports_diagnostic(self, runner, write_json, linear3_document):
        linear3_document["tau_rule"] = {"kind": "diameter-perturbed", "c": 1.0, "e": 0.5}
        path = write_json("scenario.json", linear3_document)
        result = _run(runner, "pretangent", "lift", "--scenario", str(path))
        assert result.exit_code == 1
        assert "diagnostic" in _report(result)


class TestRootOptions:
    """Tests for global options and rendering."""

    def test_invalid_budget_is_usage_error(self, runner, write_json, diam_tau):
        path = write_json("tau.json", diam_tau)
        result = _run(runner, "--budget", "0", "check", "--kind", "balk", "--input", str(path))
        assert result.exit_code == 2

    def test_render_text_flattens(self):
        text = render_text({"witness": {"A": "a", "points": ["a", "b"]}, "verdict": "fail"})
        width = len("witness.points")
        assert text.splitlines() == [
            f"{'verdict':<{width}}  fail",
            f"{'witness.A':<{width}}  a",
            f"{'witness.points':<{width}}  a, b",
        ]
