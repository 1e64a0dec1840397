"""
Tests for the grammar module.
"""

import itertools

import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st
from pydantic import ValidationError

from excesslex.errors import CycleDetectedError, GrammarFormatError
from excesslex.grammar import (
    Grammar,
    canonicalize,
    check_admissible,
    check_irreducible,
    expand,
    format_grammar,
    grammar_length,
    parse_grammar,
    rule_expansions,
    tokenize,
    vocabulary_length,
)
from excesslex.infer import infer_online
from excesslex.repeats import longest_repeat, suffix_array

from .conftest import WOODCHUCK


class TestGrammarModel:
    """Tests for the Grammar schema."""

    def test_multi_character_terminal_rejected(self):
        """Test that terminals must be single characters."""
        with pytest.raises(ValidationError):
            Grammar(rules={0: ("ab",)})

    def test_negative_rule_id_rejected(self):
        """Test that rule ids are non-negative."""
        with pytest.raises(ValidationError):
            Grammar(rules={0: (-1,), -1: ("a",)})

    def test_missing_initial_rule_rejected(self):
        """Test that a grammar needs rule 0."""
        with pytest.raises(ValidationError, match="rule 0 is missing"):
            Grammar(rules={1: ("a", "b")})

    def test_empty_production_rejected(self):
        """Test that productions are non-empty."""
        with pytest.raises(ValidationError, match="empty production"):
            Grammar(rules={0: (1, 1), 1: ()})

    def test_single_rule(self):
        """Test the trivial grammar of a string."""
        grammar = Grammar.single_rule("abc")
        assert grammar.rules == {0: ("a", "b", "c")}
        assert grammar.alphabet == frozenset("abc")
        assert grammar.rule_count == 1


class TestExpand:
    """Tests for expansion and length accounting."""

    def test_word_grammar_expands(self, word_grammar):
        """Test that the word grammar spells the woodchuck text."""
        assert expand(word_grammar) == WOODCHUCK

    def test_compressed_grammar_expands(self, compressed_grammar):
        """Test that the compressed grammar spells the same text."""
        assert expand(compressed_grammar) == WOODCHUCK

    def test_single_rule_identity(self):
        """Test expansion of a single rule."""
        assert expand(Grammar.single_rule("abc")) == "abc"

    def test_rule_expansions(self):
        """Test every rule's terminal string, and restriction to a root."""
        grammar = Grammar(rules={0: (2, 2, "c"), 1: ("a", "b"), 2: (1, 1)})
        assert rule_expansions(grammar) == {0: "ababababc", 1: "ab", 2: "abab"}
        assert rule_expansions(grammar, root=2) == {1: "ab", 2: "abab"}

    def test_cycle_detected(self):
        """Test that a self-deriving rule raises."""
        grammar = Grammar(rules={0: (1,), 1: ("a", 2), 2: (1,)})
        with pytest.raises(CycleDetectedError):
            expand(grammar)

    def test_lengths(self, word_grammar, compressed_grammar):
        """Test total and vocabulary lengths."""
        assert grammar_length(word_grammar) == 42
        assert grammar_length(compressed_grammar) == 28
        assert vocabulary_length(word_grammar) == 32
        assert vocabulary_length(compressed_grammar) == 16

    def test_single_rule_lengths(self):
        """Test lengths of the trivial grammar."""
        grammar = Grammar.single_rule(WOODCHUCK)
        assert grammar_length(grammar) == 47
        assert vocabulary_length(grammar) == 0


class TestAdmissibility:
    """Tests for admissibility checks."""

    def test_admissible(self, word_grammar, compressed_grammar):
        """Test both woodchuck grammars are admissible for the text."""
        assert check_admissible(word_grammar, WOODCHUCK)
        assert check_admissible(compressed_grammar, WOODCHUCK)

    def test_expansion_mismatch(self):
        """Test a grammar for another string is rejected with a reason."""
        result = check_admissible(Grammar.single_rule("ab"), "ba")
        assert not result
        assert result.reasons == ["expansion differs from the text"]

    def test_undefined_rule(self):
        """Test a reference to a missing rule is reported, not raised."""
        result = check_admissible(Grammar(rules={0: (1,)}), "a")
        assert not result.admissible
        assert "undefined rule 1" in result.reasons[0]

    def test_cycle_reported(self):
        """Test a cycle is reported as a reason."""
        result = check_admissible(Grammar(rules={0: (1,), 1: (0,)}), "a")
        assert not result
        assert result.reasons[0].startswith("cycle detected")


class TestIrreducibility:
    """Tests for the irreducibility report."""

    def test_compressed_grammar_irreducible(self, compressed_grammar):
        """Test the compressed grammar satisfies all three conditions."""
        assert check_irreducible(compressed_grammar).is_irreducible

    def test_word_grammar_reducible(self, word_grammar):
        """Test the word grammar violates the use and repeat conditions."""
        report = check_irreducible(word_grammar)
        assert not report.is_irreducible
        assert report.duplicate_expansion_pairs == []
        assert 3 in report.underused_nonterminals
        repeated = [sequence for sequence, _ in report.repeated_strings]
        assert tuple("chuck") in repeated

    def test_single_rule_without_repeats(self):
        """Test a string without repeats is irreducible as a single rule."""
        assert check_irreducible(Grammar.single_rule("ab")).is_irreducible

    def test_repeated_digram(self):
        """Test a repeated digram is reported with its count."""
        report = check_irreducible(Grammar.single_rule("abab"))
        assert report.repeated_strings == [(("a", "b"), 2)]

    def test_overlapping_run_not_repeated(self):
        """Test that overlapping occurrences do not count as repeats."""
        assert check_irreducible(Grammar.single_rule("aaa")).is_irreducible

    def test_duplicate_expansions(self):
        """Test two rules with the same expansion are reported."""
        grammar = Grammar(rules={0: (1, 2, 1, 2), 1: ("a", "b"), 2: ("a", "b")})
        assert check_irreducible(grammar).duplicate_expansion_pairs == [(1, 2)]


class TestCanonicalize:
    """Tests for rule renumbering."""

    def test_first_use_order(self):
        """Test rules are numbered by first use and unreachable rules dropped."""
        grammar = Grammar(rules={0: (9, 5, 5), 5: ("a", "b"), 9: ("c",), 7: ("z",)})
        assert canonicalize(grammar).rules == {0: (1, 2, 2), 1: ("c",), 2: ("a", "b")}

    def test_idempotent(self, compressed_grammar):
        """Test canonicalizing twice changes nothing."""
        once = canonicalize(compressed_grammar)
        assert canonicalize(once).rules == once.rules


class TestTokenize:
    """Tests for the hierarchical segmentation."""

    def test_word_grammar_depth_one(self, word_grammar):
        """Test the word grammar segments the text into its words."""
        tokens = tokenize(word_grammar, max_depth=1)
        words = [WOODCHUCK[s.start:s.end] for s in tokens.at_depth(1)]
        assert words == [
            "should", "a", "woodchuck", "chuck", "if",
            "a", "woodchuck", "could", "chuck", "wood",
        ]
        assert tokens.gaps == []

    def test_nested_spans(self, compressed_grammar):
        """Test the nested rule yields depth-2 spans inside its depth-1 span."""
        tokens = tokenize(compressed_grammar, max_depth=2)
        outer = [s for s in tokens.at_depth(1) if s.rule_id == 4][0]
        assert (outer.start, outer.end) == (6, 16)
        inner = [(s.start, s.end, s.rule_id) for s in tokens.at_depth(2) if outer.start <= s.start < outer.end]
        assert inner == [(7, 11, 3), (11, 16, 2)]

    def test_terminal_gaps(self, compressed_grammar):
        """Test rule-0 terminals become gaps and the segments tile the text."""
        tokens = tokenize(compressed_grammar, max_depth=1)
        assert (0, 2) in tokens.gaps
        position = 0
        for start, end, _ in tokens.segments():
            assert start == position
            position = end
        assert position == len(WOODCHUCK)

    def test_single_rule_has_no_spans(self):
        """Test a single rule produces only a gap."""
        tokens = tokenize(Grammar.single_rule("abc"))
        assert tokens.spans == []
        assert tokens.gaps == [(0, 3)]

    @hsettings(max_examples=50, deadline=None)
    @given(st.text(alphabet="abc", min_size=1, max_size=60))
    def test_nesting_invariant(self, text):
        """Test every deeper span lies in exactly one span one level up."""
        tokens = tokenize(infer_online(text))
        for span in tokens.spans:
            if span.depth == 1:
                continue
            parents = [
                p for p in tokens.at_depth(span.depth - 1)
                if p.start <= span.start and span.end <= p.end
            ]
            assert len(parents) == 1


class TestTextFormat:
    """Tests for the textual grammar format."""

    def test_format(self, compressed_grammar):
        """Test rule 0 comes first and terminal runs are merged."""
        lines = format_grammar(compressed_grammar).splitlines()
        assert lines[0] == 'R0 -> "sh" R1 R4 R2 "if" R4 "c" R1 R2 R3'
        assert lines[4] == 'R4 -> "a" R3 R2'

    def test_parse_formatted(self, word_grammar):
        """Test parsing returns the formatted rules."""
        assert parse_grammar(format_grammar(word_grammar)).rules == word_grammar.rules

    def test_escapes(self):
        """Test quotes, backslashes and newlines survive the format."""
        grammar = Grammar.single_rule('a"b\\c\nd')
        text = format_grammar(grammar)
        assert text == 'R0 -> "a\\"b\\\\c\\nd"\n'
        assert parse_grammar(text).rules == grammar.rules

    @pytest.mark.parametrize("text", [
        'R1 -> "a"',
        'R0 -> "ab',
        'R0 -> ""',
        'R0 -> "a" X',
        'R0 -> "a\\q"',
        'R0 -> "a"\nR0 -> "b"',
        '',
    ])
    def test_malformed(self, text):
        """Test malformed documents raise a format error."""
        with pytest.raises(GrammarFormatError):
            parse_grammar(text)

    def test_error_line_number(self):
        """Test the failing line is reported."""
        with pytest.raises(GrammarFormatError) as exc:
            parse_grammar('R0 -> R1\nR1 -> "a" ?')
        assert exc.value.line == 2


def _brute_longest_repeat(text):
    best = 0
    for i in range(len(text)):
        for j in range(i + 1, len(text)):
            k = 0
            while j + k < len(text) and text[i + k] == text[j + k]:
                k += 1
            best = max(best, k)
    return best


class TestLongestRepeat:
    """Tests for the suffix-structure longest repeat."""

    @pytest.mark.parametrize("text,expected", [
        ("abc", 0), ("abab", 2), ("aaaa", 3), ("", 0), ("a", 0),
    ])
    def test_examples(self, text, expected):
        """Test small known values."""
        assert longest_repeat(text) == expected

    def test_suffix_array(self):
        """Test the suffix array of a classic example."""
        assert suffix_array("banana") == [5, 3, 1, 0, 4, 2]

    @pytest.mark.slow
    def test_exhaustive_binary(self):
        """Test against brute force on every binary string up to length 12."""
        for length in range(1, 13):
            for chars in itertools.product("ab", repeat=length):
                text = "".join(chars)
                assert longest_repeat(text) == _brute_longest_repeat(text), text

    @hsettings(max_examples=200, deadline=None)
    @given(st.text(alphabet="abcd", max_size=80))
    def test_matches_brute_force(self, text):
        """Test random strings against brute force."""
        assert longest_repeat(text) == _brute_longest_repeat(text)
