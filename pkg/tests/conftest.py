"""Shared fixtures: the woodchuck text, two grammars for it and the desk corpus."""

from pathlib import Path

import pytest

from excesslex.config import get_desk_corpus_path
from excesslex.grammar import Grammar

WOODCHUCK = "shouldawoodchuckchuckifawoodchuckcouldchuckwood"
WOODCHUCK_WORDS = "should a woodchuck chuck if a woodchuck could chuck wood"

BUNDLED_DESK_CORPUS = Path(__file__).parent / "data" / "desk_corpus.txt"


@pytest.fixture
def woodchuck():
    return WOODCHUCK


@pytest.fixture
def word_grammar():
    """One rule per English word; rule 0 spells the sentence."""
    return Grammar(rules={
        0: (5, 1, 7, 6, 2, 1, 7, 4, 6, 3),
        1: ("a",),
        2: tuple("if"),
        3: tuple("wood"),
        4: tuple("could"),
        5: tuple("should"),
        6: tuple("chuck"),
        7: tuple("woodchuck"),
    })


@pytest.fixture
def compressed_grammar():
    """A shorter grammar whose rules are not aligned with words."""
    return Grammar(rules={
        0: ("s", "h", 1, 4, 2, "i", "f", 4, "c", 1, 2, 3),
        1: tuple("ould"),
        2: tuple("chuck"),
        3: tuple("wood"),
        4: ("a", 3, 2),
    })


@pytest.fixture(scope="session")
def desk_corpus():
    """The configured desk corpus, or the bundled English text."""
    configured = get_desk_corpus_path()
    return Path(configured) if configured else BUNDLED_DESK_CORPUS
