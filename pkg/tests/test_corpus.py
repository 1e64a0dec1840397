"""
Tests for ingestion, normalization and synthetic sources.
"""

from unittest.mock import patch

import pytest
from pydantic import ValidationError

from excesslex.config import get_desk_corpus_path
from excesslex.corpus import (
    ROSE_CYCLE,
    ROSE_PREFIX,
    NormalizationProfile,
    SourceSpec,
    generate,
    generate_tokens,
    ingest,
    ingest_bytes,
    normalize,
    parse_source_spec,
    zipf_word,
)
from excesslex.errors import EmptyInputError, InvalidEncodingError, InvalidSpecError
from excesslex.lexical import fit_zipf, rank_frequency

from .conftest import BUNDLED_DESK_CORPUS, WOODCHUCK, WOODCHUCK_WORDS


class TestNormalize:
    """Tests for text normalization."""

    def test_default_profile(self):
        """Test lowercasing, letter filtering and space removal."""
        assert normalize("The Rose!") == ("therose", [3])

    def test_woodchuck(self):
        """Test the woodchuck sentence and its nine cuts."""
        text, cuts = normalize(WOODCHUCK_WORDS)
        assert text == WOODCHUCK
        assert cuts == [6, 7, 16, 21, 23, 24, 33, 38, 43]

    def test_keep_spaces(self):
        """Test spaces kept as a terminal produce cuts on both sides."""
        profile = NormalizationProfile(remove_spaces=False, keep_space_as_terminal=True)
        assert normalize("a rose", profile) == ("a_rose", [1, 2])

    def test_keep_case(self):
        """Test case is kept when asked."""
        profile = NormalizationProfile(lowercase=False)
        assert normalize("A Rose", profile)[0] == "ARose"

    def test_idempotent(self):
        """Test normalizing twice changes nothing."""
        text, _ = normalize("Is a Rose, is a rose; IS A ROSE.")
        assert normalize(text) == (text, [])

    def test_exclusive_space_modes(self):
        """Test removing and keeping spaces cannot both be requested."""
        with pytest.raises(ValidationError):
            NormalizationProfile(remove_spaces=True, keep_space_as_terminal=True)

    def test_profile_digest(self):
        """Test different profiles hash differently."""
        assert NormalizationProfile().digest() != NormalizationProfile(lowercase=False).digest()


class TestIngest:
    """Tests for reading corpora."""

    def test_bundle(self, tmp_path):
        """Test a file becomes text, boundaries and provenance."""
        path = tmp_path / "rose.txt"
        path.write_text("A rose is a rose.\n", encoding="utf-8")
        bundle = ingest(path)
        assert bundle.normalized_text == "aroseisarose"
        assert bundle.reference_boundaries == [1, 5, 7, 8]
        assert bundle.provenance.source == str(path)

    def test_provenance_changes(self):
        """Test the profile takes part in the provenance."""
        first = ingest_bytes(b"a rose")
        second = ingest_bytes(b"a rose", NormalizationProfile(lowercase=False))
        assert first.provenance.source_sha256 == second.provenance.source_sha256
        assert first.provenance.combined != second.provenance.combined

    def test_invalid_utf8(self):
        """Test the offset of the first undecodable byte is reported."""
        with pytest.raises(InvalidEncodingError) as exc:
            ingest_bytes(b"abc\xffdef")
        assert exc.value.byte_offset == 3

    def test_empty_after_normalization(self):
        """Test input without letters is refused."""
        with pytest.raises(EmptyInputError):
            ingest_bytes(b"123 !!")

    def test_bundled_desk_corpus(self):
        """Test the bundled English text is large enough for the band checks."""
        bundle = ingest(BUNDLED_DESK_CORPUS)
        assert len(BUNDLED_DESK_CORPUS.read_text(encoding="utf-8")) > 480000
        assert len(bundle.normalized_text) > 250000
        assert len(bundle.reference_boundaries) > 50000

    def test_configured_desk_corpus_path(self, tmp_path):
        """Test a configured corpus path is used only when the file exists."""
        path = tmp_path / "english.txt"
        path.write_text("the cat sat\n", encoding="utf-8")
        with patch("excesslex.config.settings.desk_corpus_path", str(path)):
            assert get_desk_corpus_path() == str(path)
        with patch("excesslex.config.settings.desk_corpus_path", str(tmp_path / "missing.txt")):
            assert get_desk_corpus_path() is None


class TestSourceSpec:
    """Tests for source descriptions."""

    def test_compact_form(self):
        """Test the kind:key=value form."""
        spec = parse_source_spec("iid:alphabet=ab,seed=3,probabilities=[0.25,0.75]")
        assert spec.kind == "iid"
        assert spec.seed == 3
        assert spec.probabilities == [0.25, 0.75]

    def test_json_form(self):
        """Test a JSON document."""
        spec = parse_source_spec('{"kind": "zipf", "B": 1.2, "V": 50, "seed": 1}')
        assert spec.B == 1.2

    @pytest.mark.parametrize("text", [
        "nonsense",
        "iid:seed",
        "zipf:B=-1",
        '{"kind": "iid", ',
    ])
    def test_invalid(self, text):
        """Test malformed descriptions are refused."""
        with pytest.raises(InvalidSpecError):
            parse_source_spec(text)


class TestGenerate:
    """Tests for synthetic text generation."""

    def test_periodic_with_prefix(self):
        """Test the rose sequence starts with its prefix and then cycles."""
        text = generate(SourceSpec(kind="periodic", prefix=ROSE_PREFIX, cycle=ROSE_CYCLE), 51)
        assert text.startswith("the_rose_is_a_hose_is_a_rose_is_a_hose")
        assert len(text) == 51
        body = text[len(ROSE_PREFIX):]
        assert body[:20] == body[20:40] == ROSE_CYCLE

    def test_iid_deterministic(self):
        """Test equal seeds give equal texts and different seeds differ."""
        spec = SourceSpec(kind="iid", alphabet="abc", seed=9)
        assert generate(spec, 500) == generate(spec, 500)
        assert generate(spec, 500) != generate(spec.model_copy(update={"seed": 10}), 500)
        assert set(generate(spec, 500)) == set("abc")

    def test_seed_required(self):
        """Test stochastic sources need a seed."""
        with pytest.raises(InvalidSpecError):
            generate(SourceSpec(kind="iid", alphabet="ab"), 10)

    def test_markov_sticky(self):
        """Test a sticky chain produces long runs."""
        spec = SourceSpec(kind="markov", alphabet="ab", matrix=[[0.99, 0.01], [0.01, 0.99]], seed=4)
        text = generate(spec, 2000)
        switches = sum(1 for x, y in zip(text, text[1:]) if x != y)
        assert switches < 100

    def test_markov_invalid_matrix(self):
        """Test a matrix that does not match the alphabet is refused."""
        with pytest.raises(InvalidSpecError):
            generate(SourceSpec(kind="markov", alphabet="abc", matrix=[[1.0]], seed=1), 5)

    def test_zipf_exponent(self):
        """Test sampled word frequencies follow the requested exponent."""
        tokens = generate_tokens(SourceSpec(kind="zipf", B=1.0, V=200, seed=8), 200000)
        head = rank_frequency(tokens)
        assert fit_zipf(head).single_B == pytest.approx(1.0, abs=0.1)

    def test_zipf_words(self):
        """Test type names are letters only and distinct."""
        names = [zipf_word(r) for r in range(1, 800)]
        assert names[:3] == ["a", "b", "c"]
        assert zipf_word(27) == "aa"
        assert len(set(names)) == len(names)
        assert all(name.isalpha() for name in names)
