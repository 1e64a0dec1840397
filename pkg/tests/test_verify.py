"""
Tests for the inequality checks.
"""

from unittest.mock import patch

import pytest

from excesslex.entropy import build_distribution
from excesslex.errors import BudgetExceededError, UnsupportedSourceError
from excesslex.infer import minimal_grammar_exact
from excesslex.verify import (
    check_stationarity,
    check_theorem2_synthetic,
    check_theorem3,
    minimal_lengths,
)


class TestGrammarLengthInequalities:
    """Tests for the exhaustive grammar-length check."""

    def test_binary_up_to_six(self):
        """Test every binary pair with |vu| <= 6 satisfies the inequalities."""
        result = check_theorem3(2, 6)
        assert result.passed, result.violations[:3]
        # 14 strings of length <= 6 from halves, 196 pairs
        assert result.instances_tested >= 196

    @pytest.mark.slow
    def test_binary_up_to_fourteen(self):
        """Test the exhaustive binary suite at the default search budget."""
        result = check_theorem3(2, 14)
        assert result.passed, result.violations[:3]
        # 254 strings from halves, all pairs plus every string checked alone
        assert result.instances_tested >= 254 * 254

    def test_ternary_small(self):
        """Test a three-letter alphabet."""
        assert check_theorem3(3, 4).passed

    def test_budget_exceeded(self):
        """Test lengths beyond the exact budget are refused."""
        with pytest.raises(BudgetExceededError):
            check_theorem3(2, 15)

    @patch('excesslex.verify.record_verification')
    def test_metrics_recorded(self, mock_record):
        """Test the outcome is published."""
        result = check_theorem3(2, 2)
        mock_record.assert_called_once_with("theorem3", result.instances_tested, 0)


class TestMinimalLengths:
    """Tests for exact lengths shared across symmetric strings."""

    def test_renaming_and_reversal(self):
        """Test symmetric strings get the lengths of a direct search."""
        strings = ["abab", "baba", "abcabc", "cbacba", "aab", "baa"]
        lengths = minimal_lengths(strings)
        for text in strings:
            result = minimal_grammar_exact(text)
            assert lengths[text] == (result.length, result.vocabulary_length)
        assert lengths["abab"] == lengths["baba"]
        assert lengths["aab"] == lengths["baa"]


class TestCodeExcess:
    """Tests for E_code(n) >= E(n) on synthetic sources."""

    def test_periodic(self):
        """Test the periodic source with its exact excess entropy."""
        result = check_theorem2_synthetic("periodic", [5, 10, 20], "repair", samples=4, seed=1)
        assert result.passed
        assert result.instances_tested == 3
        assert {int(row["n"]) for row in result.details} == {5, 10, 20}

    def test_iid(self):
        """Test the memoryless source, whose excess entropy is zero."""
        result = check_theorem2_synthetic("iid", [8, 16], "repair", samples=4, seed=2)
        assert result.passed
        assert all(row["E"] == pytest.approx(0.0, abs=1e-9) for row in result.details)

    def test_markov(self):
        """Test the two-state chain."""
        assert check_theorem2_synthetic("markov", [8, 16], "online", samples=4, seed=3).passed

    def test_unsupported_source(self):
        """Test sources without an exact table are refused."""
        with pytest.raises(UnsupportedSourceError):
            check_theorem2_synthetic("english", [5])


class TestStationarity:
    """Tests for marginal consistency of n-gram counts."""

    def test_circular_passes(self):
        """Test circular windows are always consistent."""
        result = check_stationarity(build_distribution("abracadabra", 5, "circular"))
        assert result.passed
        assert result.instances_tested > 1

    def test_linear_edges_fail(self):
        """Test linear windows lose the marginal at the text end."""
        result = check_stationarity(build_distribution("aab", 2, "linear"))
        assert not result.passed
        assert {v.inputs[0] for v in result.violations} >= {"b"}
