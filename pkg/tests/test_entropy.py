"""
Tests for n-gram distributions, block entropy and excess entropy.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st

from excesslex.corpus import ROSE_CYCLE, SourceSpec, generate
from excesslex.entropy import (
    BlockEntropyTable,
    block_entropy,
    build_distribution,
    entropy_rate,
    excess_code_length,
    excess_entropy,
    excess_entropy_lower_bound,
    expected_code_length,
    hilberg_block_entropy,
    iid_block_entropy,
    markov_block_entropy,
    markov_stationary,
    periodic_block_entropy,
)
from excesslex.errors import ExcessLexError, TextTooShortError, UnsupportedSourceError
from excesslex.verify import check_stationarity

LOG20 = math.log2(20)


def _iid_text(length, seed=11):
    return generate(SourceSpec(kind="iid", alphabet="ab", seed=seed), length)


class TestEmpiricalDistribution:
    """Tests for n-gram counting."""

    def test_circular_counts(self):
        """Test circular windows wrap around."""
        dist = build_distribution("aab", 2, "circular")
        assert dist.counts(2) == {"aa": 1, "ab": 1, "ba": 1}
        assert dist.total(2) == 3

    def test_linear_counts(self):
        """Test linear windows stop at the end."""
        dist = build_distribution("aab", 2, "linear")
        assert dist.counts(2) == {"aa": 1, "ab": 1}
        assert dist.total(2) == 2

    def test_probability(self):
        """Test probabilities are relative counts."""
        dist = build_distribution("abab", 2)
        assert dist.probability("ab") == 0.5
        assert dist.probability("aa") == 0.0

    def test_too_short(self):
        """Test n larger than the text is refused."""
        with pytest.raises(TextTooShortError):
            build_distribution("abc", 4)

    def test_zero_order(self):
        """Test n_max must be positive."""
        with pytest.raises(ExcessLexError):
            build_distribution("abc", 0)

    @hsettings(max_examples=100, deadline=None)
    @given(st.text(alphabet="abc", min_size=4, max_size=200))
    def test_circular_marginals_consistent(self, text):
        """Test circular counts have consistent left and right marginals."""
        assert check_stationarity(build_distribution(text, 4, "circular")).passed

    @hsettings(max_examples=50, deadline=None)
    @given(st.text(alphabet="abc", min_size=4, max_size=200))
    def test_counts_sum_to_total(self, text):
        """Test every n-gram table sums to the window count."""
        dist = build_distribution(text, 4, "linear")
        for n in range(1, 5):
            assert sum(dist.counts(n).values()) == dist.total(n)


class TestBlockEntropy:
    """Tests for block entropy tables."""

    def test_periodic_exact(self):
        """Test a periodic text with period 20 has H(n) = log2 20 from n = 20 on."""
        text = generate(SourceSpec(kind="periodic", cycle=ROSE_CYCLE), 2000)
        table = block_entropy(build_distribution(text, 40, "circular"))
        for n in range(20, 41):
            assert table.entropy(n) == pytest.approx(LOG20, abs=1e-9)
        assert table.entropy(0) == 0.0

    def test_periodic_excess(self):
        """Test the excess entropy of the periodic text at n = 20."""
        text = generate(SourceSpec(kind="periodic", cycle=ROSE_CYCLE), 2000)
        series = excess_entropy(block_entropy(build_distribution(text, 40, "circular")))
        assert series.value(20) == pytest.approx(LOG20, abs=1e-9)

    def test_periodic_stationarity(self):
        """Test the periodic text passes the marginal check."""
        text = generate(SourceSpec(kind="periodic", cycle=ROSE_CYCLE), 2000)
        result = check_stationarity(build_distribution(text, 10, "circular"))
        assert result.passed
        assert result.instances_tested > 1

    def test_iid_uniform(self):
        """Test plug-in estimates on uniform random bits."""
        table = block_entropy(build_distribution(_iid_text(2 ** 18), 10, "circular"))
        for n in range(1, 11):
            assert abs(table.entropy(n) - n) <= 0.05 * n
        series = excess_entropy(table)
        for n in range(1, 6):
            assert abs(series.value(n)) <= 0.2

    def test_differences(self):
        """Test first and second differences."""
        table = BlockEntropyTable.from_entropies({1: 1.0, 2: 1.5, 3: 1.75})
        rows = {row.n: row for row in table.rows}
        assert rows[0].H_prime is None
        assert rows[2].H_prime == 0.5
        assert rows[3].H_double_prime == pytest.approx(-0.25)

    def test_reliability_flag(self):
        """Test rows whose entropy exceeds the log sample length are flagged."""
        table = BlockEntropyTable.from_entropies({1: 1.0, 10: 7.0}, source_length=64)
        reliable = {row.n: row.reliable for row in table.rows}
        assert reliable[1]
        assert not reliable[10]

    def test_plug_in_rows_reliable(self):
        """Test plug-in estimates never exceed the log of the sample length."""
        table = block_entropy(build_distribution(_iid_text(64), 10))
        assert all(row.reliable for row in table.rows)

    def test_distinct_counts(self):
        """Test distinct n-gram counts are reported."""
        table = block_entropy(build_distribution("abcabc", 3))
        assert [row.distinct for row in table.rows] == [1, 3, 3, 3]

    def test_rate_from_blocks(self):
        """Test the block estimate of the entropy rate."""
        table = iid_block_entropy([0.5, 0.5], 8)
        assert entropy_rate(table).h_from_blocks == pytest.approx(1.0)
        assert excess_entropy_lower_bound(table) == pytest.approx(0.0)

    def test_rate_from_code(self):
        """Test the code estimate is attached when a text is given."""
        estimate = entropy_rate(iid_block_entropy([0.5, 0.5], 4), "ab" * 1024, "repair")
        assert 0 < estimate.h_from_code < 0.5


class TestAnalyticTables:
    """Tests for exact tables of synthetic sources."""

    def test_iid(self):
        """Test H(n) = n H(1)."""
        table = iid_block_entropy([0.25, 0.25, 0.5], 5)
        assert table.entropy(5) == pytest.approx(7.5)

    def test_invalid_probabilities(self):
        """Test non-distributions are refused."""
        with pytest.raises(UnsupportedSourceError):
            iid_block_entropy([0.5, 0.6], 3)

    def test_periodic(self):
        """Test the random-phase periodic table saturates at log2 of the period."""
        table = periodic_block_entropy(ROSE_CYCLE, 60)
        assert table.entropy(60) == pytest.approx(LOG20)
        assert excess_entropy(table).value(30) == pytest.approx(LOG20)

    def test_markov(self):
        """Test a symmetric chain."""
        stay = 0.9
        matrix = [[stay, 1 - stay], [1 - stay, stay]]
        assert markov_stationary(matrix) == pytest.approx([0.5, 0.5])
        table = markov_block_entropy(matrix, 4)
        conditional = -(stay * math.log2(stay) + (1 - stay) * math.log2(1 - stay))
        assert table.entropy(4) == pytest.approx(1 + 3 * conditional)
        assert excess_entropy(table).value(2) == pytest.approx(1 - conditional)

    def test_markov_invalid(self):
        """Test non-stochastic matrices are refused."""
        with pytest.raises(UnsupportedSourceError):
            markov_stationary([[0.5, 0.4], [0.5, 0.5]])

    def test_hilberg(self):
        """Test the power-law table."""
        table = hilberg_block_entropy(0.0, 3.1, 0.5, 0.4, [1, 4, 100])
        assert table.entropy(100) == pytest.approx(31 + 40)
        assert table.entropy(0) == 0.0


class TestCodeExcess:
    """Tests for code-based excess estimates."""

    def test_periodic_code_excess(self):
        """Test the code excess on a periodic text is positive."""
        text = generate(SourceSpec(kind="periodic", cycle=ROSE_CYCLE), 800)
        row = excess_code_length(text, "repair", 40, 4)
        assert row.samples == 4
        assert row.E_code > 0

    def test_window_count(self):
        """Test texts too short for the windows are refused."""
        with pytest.raises(TextTooShortError):
            excess_code_length("ab" * 10, "repair", 10, 4)

    def test_expected_code_length(self):
        """Test the mean code length of windows is positive and finite."""
        value = expected_code_length(_iid_text(512), "online", 32, 4)
        assert np.isfinite(value) and value > 0
