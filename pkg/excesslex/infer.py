import logging
import time
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator

from .config import settings
from .errors import EmptyInputError
from .exact import search_minimal_grammar
from .grammar import Grammar, canonicalize, grammar_length, vocabulary_length
from .metrics import record_inference, record_search_nodes
from .reduction import reduce_to_irreducible
from .repair import RePair
from .sequitur import Sequitur

logger = logging.getLogger(__name__)

MAX_EXACT_LENGTH_BUDGET = 16

Algorithm = Literal["online", "repair", "exact"]


class InferenceConfig(BaseModel):
    """Grammar inference settings."""
    algorithm: Algorithm = Field(
        default_factory=lambda: settings.default_algorithm,
        description="online digram uniqueness, offline pairing, or exhaustive search",
    )
    exact_length_budget: int = Field(
        default_factory=lambda: settings.exact_length_budget,
        ge=1,
        description="Longest text accepted by the exhaustive search",
    )
    tie_break: Literal["fewest-rules-lexicographic"] = Field(
        "fewest-rules-lexicographic",
        description="Order among grammars of equal minimal length",
    )

    @field_validator("exact_length_budget")
    @classmethod
    def _cap_budget(cls, value: int) -> int:
        if value > MAX_EXACT_LENGTH_BUDGET:
            raise ValueError(f"exact_length_budget must be at most {MAX_EXACT_LENGTH_BUDGET}")
        return value


class MinimalGrammarResult(BaseModel):
    """A grammar together with its length and vocabulary length."""
    grammar: Grammar
    length: int = Field(..., description="Total production length")
    vocabulary_length: int = Field(..., description="Length of the non-initial rules")
    proof_of_minimality: bool = Field(False, description="True only for exhaustive search")


def _check_text(text: str) -> None:
    if not text:
        raise EmptyInputError("cannot infer a grammar for an empty text")


def _no_worse_than_single_rule(grammar: Grammar, text: str) -> Grammar:
    if grammar_length(grammar) <= len(text):
        return grammar
    return reduce_to_irreducible(Grammar.single_rule(text))


def infer_online(text: str) -> Grammar:
    """Irreducible grammar grown one character at a time."""
    _check_text(text)
    builder = Sequitur()
    builder.extend(text)
    grammar = reduce_to_irreducible(builder.to_grammar())
    return canonicalize(_no_worse_than_single_rule(grammar, text))


def infer_repair(text: str) -> Grammar:
    """Irreducible grammar from repeated most-frequent-pair replacement."""
    _check_text(text)
    grammar = reduce_to_irreducible(RePair(text).run().to_grammar())
    return canonicalize(_no_worse_than_single_rule(grammar, text))


def minimal_grammar_exact(text: str, budget: Optional[int] = None) -> MinimalGrammarResult:
    """A grammar of minimal total length, found exhaustively."""
    if budget is None:
        budget = settings.exact_length_budget
    budget = min(budget, MAX_EXACT_LENGTH_BUDGET)
    search = search_minimal_grammar(text, budget)
    record_search_nodes(search.nodes)
    grammar = canonicalize(reduce_to_irreducible(search.to_grammar()))
    return MinimalGrammarResult(
        grammar=grammar,
        length=grammar_length(grammar),
        vocabulary_length=vocabulary_length(grammar),
        proof_of_minimality=True,
    )


def infer(text: str, config: Optional[InferenceConfig] = None) -> Grammar:
    """Infer a grammar with the configured algorithm and record metrics."""
    config = config or InferenceConfig()
    start_time = time.time()
    if config.algorithm == "online":
        grammar = infer_online(text)
    elif config.algorithm == "repair":
        grammar = infer_repair(text)
    else:
        grammar = minimal_grammar_exact(text, config.exact_length_budget).grammar
    duration = time.time() - start_time

    length = grammar_length(grammar)
    record_inference(config.algorithm, duration, length)
    logger.debug(
        "%s inference: %d chars -> %d symbols, %d rules in %.3fs",
        config.algorithm, len(text), length, grammar.rule_count, duration,
    )
    return grammar
