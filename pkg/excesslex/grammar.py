"""
Straight-line grammars: a single rule per nonterminal, rule 0 expands to one text.

A symbol is either a terminal (a one-character ``str``) or a nonterminal
(a non-negative ``int`` naming a rule).
"""

from collections import defaultdict
from typing import Dict, Iterator, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .errors import CycleDetectedError, ExcessLexError, GrammarFormatError

Symbol = Union[int, str]
Production = Tuple[Symbol, ...]


class Grammar(BaseModel):
    """Rule table mapping nonterminal ids to productions; rule 0 is initial."""
    model_config = ConfigDict(frozen=True)

    rules: Dict[int, Tuple[Union[int, str], ...]] = Field(
        ..., description="Production of every nonterminal id"
    )

    @field_validator("rules")
    @classmethod
    def _check_symbols(cls, rules):
        if 0 not in rules:
            raise ValueError("rule 0 is missing")
        for rule_id, production in rules.items():
            if rule_id < 0:
                raise ValueError(f"negative rule id {rule_id}")
            if not production:
                raise ValueError(f"rule {rule_id} has an empty production")
            for symbol in production:
                if isinstance(symbol, str) and len(symbol) != 1:
                    raise ValueError(f"terminal {symbol!r} is not a single character")
                if isinstance(symbol, int) and symbol < 0:
                    raise ValueError(f"negative nonterminal {symbol}")
        return rules

    @classmethod
    def single_rule(cls, text: str) -> "Grammar":
        """The trivial grammar {b0 -> text}."""
        return cls.model_construct(rules={0: tuple(text)})

    @property
    def alphabet(self) -> frozenset:
        """Terminal characters used anywhere in the grammar."""
        return frozenset(
            symbol
            for production in self.rules.values()
            for symbol in production
            if isinstance(symbol, str)
        )

    @property
    def rule_count(self) -> int:
        return len(self.rules)


class TokenSpan(BaseModel):
    """A nonterminal segment of the expanded text."""
    model_config = ConfigDict(frozen=True)

    start: int = Field(..., ge=0, description="0-based start index")
    end: int = Field(..., description="Exclusive end index")
    depth: int = Field(..., ge=1, description="Nesting depth, 1 for rule-0 symbols")
    rule_id: int = Field(..., description="Nonterminal generating the segment")


class Tokenization(BaseModel):
    """Hierarchical segmentation of a text induced by a grammar."""
    model_config = ConfigDict(frozen=True)

    text_length: int = Field(..., ge=0)
    spans: List[TokenSpan] = Field(default_factory=list)
    gaps: List[Tuple[int, int]] = Field(
        default_factory=list, description="Rule-0 terminal runs outside any span"
    )

    def at_depth(self, depth: int) -> List[TokenSpan]:
        return [span for span in self.spans if span.depth == depth]

    def boundaries(self) -> set:
        """Cuts at depth-1 span edges, excluding the text ends."""
        cuts = set()
        for span in self.at_depth(1):
            cuts.add(span.start)
            cuts.add(span.end)
        cuts.discard(0)
        cuts.discard(self.text_length)
        return cuts

    def segments(self) -> List[Tuple[int, int, bool]]:
        """Depth-1 spans and gaps as a tiling of the text; the flag marks words."""
        pieces = [(s.start, s.end, True) for s in self.at_depth(1)]
        pieces.extend((start, end, False) for start, end in self.gaps)
        return sorted(pieces)


class IrreducibilityReport(BaseModel):
    """Violations of the three irreducibility conditions."""
    model_config = ConfigDict(frozen=True)

    duplicate_expansion_pairs: List[Tuple[int, int]] = Field(default_factory=list)
    underused_nonterminals: List[int] = Field(default_factory=list)
    repeated_strings: List[Tuple[Tuple[Union[int, str], ...], int]] = Field(default_factory=list)

    @property
    def is_irreducible(self) -> bool:
        return not (
            self.duplicate_expansion_pairs
            or self.underused_nonterminals
            or self.repeated_strings
        )


class AdmissibilityCheck(BaseModel):
    """Outcome of an admissibility check with the reasons for failure."""
    admissible: bool
    reasons: List[str] = Field(default_factory=list)

    def __bool__(self) -> bool:
        return self.admissible


def symbol_key(symbol: Symbol) -> Tuple[int, Union[int, str]]:
    """Total order on mixed symbols: terminals before nonterminals."""
    return (1, symbol) if isinstance(symbol, int) else (0, symbol)


def topological_order(grammar: Grammar, root: Optional[int] = None) -> List[int]:
    """Rules in dependency order (children first); raises on cycles."""
    roots = [root] if root is not None else sorted(grammar.rules)
    state: Dict[int, int] = {}
    order: List[int] = []
    for start in roots:
        if start in state:
            continue
        if start not in grammar.rules:
            raise ExcessLexError(f"rule {start} is not defined")
        state[start] = 1
        stack: List[Tuple[int, Iterator[Symbol]]] = [(start, iter(grammar.rules[start]))]
        while stack:
            rule_id, symbols = stack[-1]
            for symbol in symbols:
                if not isinstance(symbol, int):
                    continue
                if symbol not in grammar.rules:
                    raise ExcessLexError(f"rule {rule_id} references undefined rule {symbol}")
                seen = state.get(symbol)
                if seen == 1:
                    raise CycleDetectedError(f"rule {symbol} derives itself")
                if seen is None:
                    state[symbol] = 1
                    stack.append((symbol, iter(grammar.rules[symbol])))
                    break
            else:
                stack.pop()
                state[rule_id] = 2
                order.append(rule_id)
    return order


def rule_expansions(grammar: Grammar, root: Optional[int] = None) -> Dict[int, str]:
    """Terminal string of every rule reachable from ``root`` (all rules if None)."""
    expansions: Dict[int, str] = {}
    for rule_id in topological_order(grammar, root):
        expansions[rule_id] = "".join(
            expansions[s] if isinstance(s, int) else s for s in grammar.rules[rule_id]
        )
    return expansions


def rule_lengths(grammar: Grammar) -> Dict[int, int]:
    """Expansion length of every rule without building the strings."""
    lengths: Dict[int, int] = {}
    for rule_id in topological_order(grammar):
        lengths[rule_id] = sum(
            lengths[s] if isinstance(s, int) else 1 for s in grammar.rules[rule_id]
        )
    return lengths


def expand(grammar: Grammar) -> str:
    """The unique terminal string derived from rule 0."""
    return rule_expansions(grammar, root=0)[0]


def grammar_length(grammar: Grammar) -> int:
    """Total number of symbols over all productions."""
    return sum(len(production) for production in grammar.rules.values())


def vocabulary_length(grammar: Grammar) -> int:
    """Length of the non-initial rules."""
    return grammar_length(grammar) - len(grammar.rules.get(0, ()))


def check_admissible(grammar: Grammar, text: str) -> AdmissibilityCheck:
    """Whether the grammar is well formed and rule 0 expands to ``text``."""
    reasons = []
    if 0 not in grammar.rules:
        reasons.append("rule 0 is missing")
    for rule_id, production in sorted(grammar.rules.items()):
        if not production:
            reasons.append(f"rule {rule_id} has an empty production")
        for symbol in production:
            if isinstance(symbol, int) and symbol not in grammar.rules:
                reasons.append(f"rule {rule_id} references undefined rule {symbol}")
    if not reasons:
        try:
            derived = expand(grammar)
        except CycleDetectedError as exc:
            reasons.append(f"cycle detected: {exc}")
        else:
            if derived != text:
                reasons.append("expansion differs from the text")
    return AdmissibilityCheck(admissible=not reasons, reasons=reasons)


def use_counts(grammar: Grammar) -> Dict[int, int]:
    """How often each nonterminal occurs across all productions."""
    counts = {rule_id: 0 for rule_id in grammar.rules}
    for production in grammar.rules.values():
        for symbol in production:
            if isinstance(symbol, int):
                counts[symbol] = counts.get(symbol, 0) + 1
    return counts


def digram_occurrences(
    rules: Dict[int, Production]
) -> Dict[Tuple[Symbol, Symbol], List[Tuple[int, int]]]:
    """Non-overlapping digram occurrences, counted left-greedily per production."""
    occurrences: Dict[Tuple[Symbol, Symbol], List[Tuple[int, int]]] = defaultdict(list)
    for rule_id in sorted(rules):
        production = rules[rule_id]
        last_taken: Dict[Tuple[Symbol, Symbol], int] = {}
        for pos in range(len(production) - 1):
            digram = (production[pos], production[pos + 1])
            if last_taken.get(digram) == pos - 1:
                continue
            last_taken[digram] = pos
            occurrences[digram].append((rule_id, pos))
    return occurrences


def _maximal_repeat(
    rules: Dict[int, Production], places: List[Tuple[int, int]]
) -> Tuple[Symbol, ...]:
    """Extend a repeated digram while every occurrence agrees and none overlap."""
    start, length = 0, 2

    def disjoint(offset: int, size: int) -> bool:
        spans = sorted((rule_id, pos + offset) for rule_id, pos in places)
        return all(
            a[0] != b[0] or a[1] + size <= b[1] for a, b in zip(spans, spans[1:])
        )

    while True:
        following = set()
        for rule_id, pos in places:
            end = pos + start + length
            production = rules[rule_id]
            following.add(production[end] if end < len(production) else None)
        if len(following) != 1 or None in following or not disjoint(start, length + 1):
            break
        length += 1
    while True:
        preceding = set()
        for rule_id, pos in places:
            before = pos + start - 1
            preceding.add(rules[rule_id][before] if before >= 0 else None)
        if len(preceding) != 1 or None in preceding or not disjoint(start - 1, length + 1):
            break
        start -= 1
        length += 1
    rule_id, pos = places[0]
    return tuple(rules[rule_id][pos + start:pos + start + length])


def check_irreducible(grammar: Grammar) -> IrreducibilityReport:
    """List every violation of the irreducibility conditions."""
    expansions = rule_expansions(grammar)
    by_expansion: Dict[str, List[int]] = defaultdict(list)
    for rule_id in sorted(expansions):
        by_expansion[expansions[rule_id]].append(rule_id)
    duplicates = [
        (ids[i], ids[j])
        for ids in by_expansion.values()
        for i in range(len(ids))
        for j in range(i + 1, len(ids))
    ]

    counts = use_counts(grammar)
    underused = sorted(rule_id for rule_id, count in counts.items() if rule_id != 0 and count < 2)

    repeated: Dict[Tuple[Symbol, ...], int] = {}
    for places in digram_occurrences(grammar.rules).values():
        if len(places) >= 2:
            sequence = _maximal_repeat(grammar.rules, places)
            repeated[sequence] = max(repeated.get(sequence, 0), len(places))

    def contained(short: Tuple[Symbol, ...], long: Tuple[Symbol, ...]) -> bool:
        return len(short) < len(long) and any(
            long[i:i + len(short)] == short for i in range(len(long) - len(short) + 1)
        )

    maximal = [
        (sequence, count)
        for sequence, count in repeated.items()
        if not any(contained(sequence, other) and repeated[other] == count for other in repeated)
    ]
    maximal.sort(key=lambda item: [symbol_key(s) for s in item[0]])
    return IrreducibilityReport(
        duplicate_expansion_pairs=duplicates,
        underused_nonterminals=underused,
        repeated_strings=maximal,
    )


def canonicalize(grammar: Grammar) -> Grammar:
    """Renumber rules by first use in a pre-order walk from rule 0."""
    mapping = {0: 0}
    stack = [iter(grammar.rules[0])]
    while stack:
        for symbol in stack[-1]:
            if isinstance(symbol, int) and symbol not in mapping:
                if symbol not in grammar.rules:
                    raise ExcessLexError(f"undefined rule {symbol}")
                mapping[symbol] = len(mapping)
                stack.append(iter(grammar.rules[symbol]))
                break
        else:
            stack.pop()
    rules = {
        mapping[old]: tuple(mapping[s] if isinstance(s, int) else s for s in grammar.rules[old])
        for old in mapping
    }
    return Grammar.model_construct(rules=dict(sorted(rules.items())))


def tokenize(grammar: Grammar, max_depth: Optional[int] = None) -> Tokenization:
    """Project the grammar onto its text as nested nonterminal spans."""
    lengths = rule_lengths(grammar)
    spans: List[TokenSpan] = []
    gaps: List[Tuple[int, int]] = []

    pos = 0
    gap_start: Optional[int] = None
    for symbol in grammar.rules[0]:
        if isinstance(symbol, str):
            if gap_start is None:
                gap_start = pos
            pos += 1
            continue
        if gap_start is not None:
            gaps.append((gap_start, pos))
            gap_start = None
        # depth-first so each parent precedes its children
        stack = [(symbol, pos, 1)]
        while stack:
            rule_id, start, depth = stack.pop()
            spans.append(TokenSpan(start=start, end=start + lengths[rule_id], depth=depth, rule_id=rule_id))
            if max_depth is not None and depth >= max_depth:
                continue
            children = []
            offset = start
            for child in grammar.rules[rule_id]:
                if isinstance(child, int):
                    children.append((child, offset, depth + 1))
                    offset += lengths[child]
                else:
                    offset += 1
            stack.extend(reversed(children))
        pos += lengths[symbol]
    if gap_start is not None:
        gaps.append((gap_start, pos))

    spans.sort(key=lambda span: (span.depth, span.start))
    return Tokenization(text_length=pos, spans=spans, gaps=gaps)


# Textual interchange format: one rule per line, `R<k> -> item item ...`

_ESCAPES = {'"': '\\"', '\\': '\\\\', '\n': '\\n'}
_UNESCAPES = {'"': '"', '\\': '\\', 'n': '\n'}


def _quote(run: str) -> str:
    return '"' + "".join(_ESCAPES.get(ch, ch) for ch in run) + '"'


def format_grammar(grammar: Grammar) -> str:
    """Serialize with rule R0 first; consecutive terminals form one quoted run."""
    lines = []
    for rule_id in sorted(grammar.rules, key=lambda r: (r != 0, r)):
        items = []
        run: List[str] = []
        for symbol in grammar.rules[rule_id]:
            if isinstance(symbol, str):
                run.append(symbol)
                continue
            if run:
                items.append(_quote("".join(run)))
                run = []
            items.append(f"R{symbol}")
        if run:
            items.append(_quote("".join(run)))
        lines.append(f"R{rule_id} -> " + " ".join(items))
    return "\n".join(lines) + "\n"


def _parse_items(body: str, line_no: int) -> List[Symbol]:
    symbols: List[Symbol] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch in " \t":
            i += 1
        elif ch == "R":
            j = i + 1
            while j < len(body) and body[j].isdigit():
                j += 1
            if j == i + 1:
                raise GrammarFormatError("expected digits after R", line_no)
            symbols.append(int(body[i + 1:j]))
            i = j
        elif ch == '"':
            i += 1
            closed = False
            run_start = len(symbols)
            while i < len(body):
                ch = body[i]
                if ch == '"':
                    closed = True
                    i += 1
                    break
                if ch == "\\":
                    if i + 1 >= len(body) or body[i + 1] not in _UNESCAPES:
                        raise GrammarFormatError("invalid escape sequence", line_no)
                    symbols.append(_UNESCAPES[body[i + 1]])
                    i += 2
                else:
                    symbols.append(ch)
                    i += 1
            if not closed:
                raise GrammarFormatError("unterminated terminal run", line_no)
            if len(symbols) == run_start:
                raise GrammarFormatError("empty terminal run", line_no)
        else:
            raise GrammarFormatError(f"unexpected character {ch!r}", line_no)
    return symbols


def parse_grammar(text: str) -> Grammar:
    """Read the textual grammar format written by ``format_grammar``."""
    rules: Dict[int, Production] = {}
    for line_no, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line.strip():
            continue
        head, arrow, body = line.partition("->")
        head = head.strip()
        if not arrow or not head.startswith("R") or not head[1:].isdigit():
            raise GrammarFormatError("expected 'R<k> -> items'", line_no)
        rule_id = int(head[1:])
        if not rules and rule_id != 0:
            raise GrammarFormatError("the first rule must be R0", line_no)
        if rule_id in rules:
            raise GrammarFormatError(f"rule R{rule_id} defined twice", line_no)
        production = _parse_items(body, line_no)
        if not production:
            raise GrammarFormatError(f"rule R{rule_id} has an empty production", line_no)
        rules[rule_id] = tuple(production)
    if not rules:
        raise GrammarFormatError("no rules found")
    return Grammar(rules=rules)
