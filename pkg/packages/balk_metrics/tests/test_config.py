"""
Tests for BalkConfig and report models.
"""

import pytest
from pydantic import ValidationError

from balk_metrics.config import BalkConfig, CheckReport, Verdict, Witness, resolve
from balk_metrics.core import Tolerance, ToleranceMode


class TestBalkConfig:
    """Tests for defaults, validators and environment loading."""

    def test_defaults(self):
        config = BalkConfig()
        assert config.epsilon == 1e-9
        assert config.exhaustive_max_n == 10
        assert config.pretangent_prefix == 10_000
        assert config.tolerance() == Tolerance(eps=1e-9, mode=ToleranceMode.RELATIVE)

    def test_from_env(self, monkeypatch):
        monkeypatch.setenv("BALK_EPSILON", "1e-6")
        monkeypatch.setenv("BALK_TOLERANCE_MODE", "absolute")
        monkeypatch.setenv("BALK_SEED", "42")
        config = BalkConfig.from_env()
        assert config.epsilon == 1e-6
        assert config.tolerance_mode == ToleranceMode.ABSOLUTE
        assert config.seed == 42

    def test_empty_env_values_ignored(self, monkeypatch):
        monkeypatch.setenv("BALK_SAMPLE_BUDGET", "")
        assert BalkConfig.from_env().sample_budget == 10_000_000

    @pytest.mark.parametrize("field,value", [
        ("exhaustive_max_n", 25),
        ("oracle_max_n", 0),
        ("sample_budget", 0),
        ("epsilon", -1.0),
        ("envelope_ratio", 1.0),
    ])
    def test_invalid_values(self, field, value):
        with pytest.raises(ValidationError):
            BalkConfig(**{field: value})

    def test_limit_tolerance_is_relative(self):
        tol = BalkConfig(pretangent_tolerance=1e-4).limit_tolerance()
        assert tol.eps == 1e-4
        assert tol.mode == ToleranceMode.RELATIVE

    def test_resolve_prefers_explicit_tolerance(self):
        explicit = Tolerance(eps=0.5)
        config, tol = resolve(None, explicit)
        assert tol is explicit
        assert config == BalkConfig()


class TestReports:
    """Tests for CheckReport and Witness."""

    def test_witness_aliases(self):
        witness = Witness(condition="triangle", A="a", B="b,c", C="b", lhs=6.0, rhs=3.0, relation="<= sum")
        assert witness.set_b == "b,c"
        assert witness.model_dump(by_alias=True)["B"] == "b,c"

    def test_passed_and_renamed(self):
        report = CheckReport(check="g", verdict=Verdict.SAMPLED_PASS, epsilon=1e-9)
        assert report.passed
        renamed = report.renamed("symmetric-g")
        assert renamed.check == "symmetric-g"
        assert report.check == "g"
