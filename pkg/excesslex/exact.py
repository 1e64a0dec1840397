"""
Exhaustive smallest-grammar search for short strings.

A minimal grammar never holds a rule used once or two rules with equal
expansions, so its rule expansions are substrings of the text with at least
two non-overlapping occurrences. Given a set of such expansions, the best
grammar writes every expansion (and the text) as a shortest parse over the
strictly shorter members of the set. The search decides membership of each
candidate in increasing length order, so a candidate's own cost is fixed the
moment it is included.
"""

import logging
import math
from typing import Dict, List, Optional, Tuple

from .errors import BudgetExceededError, EmptyInputError
from .grammar import Grammar, Symbol

logger = logging.getLogger(__name__)

_EPS = 1e-9


def count_non_overlapping(text: str, pattern: str) -> int:
    """Occurrences of ``pattern`` in ``text`` taken left-greedily without overlap."""
    count = 0
    start = text.find(pattern)
    while start >= 0:
        count += 1
        start = text.find(pattern, start + len(pattern))
    return count


def rule_candidates(text: str) -> List[str]:
    """Substrings of length two or more occurring twice without overlap."""
    seen = set()
    for length in range(2, len(text) // 2 + 1):
        for start in range(len(text) - length + 1):
            piece = text[start:start + length]
            if piece not in seen and count_non_overlapping(text, piece) >= 2:
                seen.add(piece)
    return sorted(seen, key=lambda s: (len(s), s))


class ExactSearch:
    """Branch and bound over candidate rule sets for one text."""

    def __init__(self, text: str):
        self.text = text
        self.candidates = rule_candidates(text)
        self.targets = self.candidates + [text]
        self.weights = [
            1.0 + 2.0 / count_non_overlapping(text, c) for c in self.candidates
        ]
        # matches[t][end] lists (start, candidate) for strictly shorter candidates
        self.matches: List[List[List[Tuple[int, int]]]] = []
        self.relevant: List[int] = []
        for target in self.targets:
            ends: List[List[Tuple[int, int]]] = [[] for _ in range(len(target) + 1)]
            relevant = 0
            for idx, cand in enumerate(self.candidates):
                if len(cand) >= len(target):
                    break
                start = target.find(cand)
                while start >= 0:
                    ends[start + len(cand)].append((start, idx))
                    relevant |= 1 << idx
                    start = target.find(cand, start + 1)
            self.matches.append(ends)
            self.relevant.append(relevant)
        self._cost_memo: Dict[Tuple[int, int], int] = {}
        self.nodes = 0
        self.best: Optional[Tuple[int, int, Tuple[str, ...]]] = None
        self.best_mask = 0

    def parse_cost(self, target: int, mask: int) -> int:
        """Fewest symbols writing target ``target`` with the rules in ``mask``."""
        mask &= self.relevant[target]
        key = (target, mask)
        cached = self._cost_memo.get(key)
        if cached is not None:
            return cached
        ends = self.matches[target]
        best = [0] * len(ends)
        for i in range(1, len(ends)):
            value = best[i - 1] + 1
            for start, idx in ends[i]:
                if mask >> idx & 1 and best[start] + 1 < value:
                    value = best[start] + 1
            best[i] = value
        self._cost_memo[key] = best[-1]
        return best[-1]

    def relaxed_cost(self, included: int, undecided: int) -> float:
        """Lower bound on the text parse when undecided rules are paid per use."""
        ends = self.matches[-1]
        best = [0.0] * len(ends)
        for i in range(1, len(ends)):
            value = best[i - 1] + 1.0
            for start, idx in ends[i]:
                bit = 1 << idx
                if included & bit:
                    weight = 1.0
                elif undecided & bit:
                    weight = self.weights[idx]
                else:
                    continue
                if best[start] + weight < value:
                    value = best[start] + weight
            best[i] = value
        return best[-1]

    def _offer(self, length: int, mask: int) -> None:
        rules = bin(mask).count("1")
        if self.best is not None:
            if (length, rules) > self.best[:2]:
                return
        key = (length, rules, tuple(sorted(c for i, c in enumerate(self.candidates) if mask >> i & 1)))
        if self.best is None or key < self.best:
            self.best = key
            self.best_mask = mask

    def _visit(self, k: int, included: int, fixed: int) -> None:
        self.nodes += 1
        text_target = len(self.targets) - 1
        self._offer(fixed + self.parse_cost(text_target, included), included)
        if k == len(self.candidates):
            return
        undecided = ((1 << len(self.candidates)) - 1) & ~((1 << k) - 1)
        # grammar lengths are integers
        bound = fixed + math.ceil(self.relaxed_cost(included, undecided) - _EPS)
        best_length, best_rules, _ = self.best
        if bound > best_length:
            return
        if bound == best_length and bin(included).count("1") >= best_rules:
            return
        own = self.parse_cost(k, included)
        self._visit(k + 1, included | 1 << k, fixed + own)
        self._visit(k + 1, included, fixed)

    def run(self) -> "ExactSearch":
        self._offer(len(self.text), 0)
        self._visit(0, 0, 0)
        return self

    def _parse(self, target: int, mask: int) -> List[object]:
        """A shortest parse as a list of terminals and candidate indices."""
        ends = self.matches[target]
        text = self.targets[target]
        best = [0] * len(ends)
        back: List[Tuple[int, Optional[int]]] = [(0, None)] * len(ends)
        for i in range(1, len(ends)):
            best[i], back[i] = best[i - 1] + 1, (i - 1, None)
            for start, idx in ends[i]:
                if mask >> idx & 1 and best[start] + 1 < best[i]:
                    best[i], back[i] = best[start] + 1, (start, idx)
        pieces: List[object] = []
        i = len(ends) - 1
        while i > 0:
            start, idx = back[i]
            pieces.append(text[start] if idx is None else idx)
            i = start
        pieces.reverse()
        return pieces

    def to_grammar(self) -> Grammar:
        """The best grammar found; rule ids follow candidate order."""
        mask = self.best_mask
        chosen = [i for i in range(len(self.candidates)) if mask >> i & 1]
        ids = {idx: n for n, idx in enumerate(chosen, start=1)}

        def body(target: int) -> Tuple[Symbol, ...]:
            return tuple(ids[p] if isinstance(p, int) else p for p in self._parse(target, mask))

        rules: Dict[int, Tuple[Symbol, ...]] = {0: body(len(self.targets) - 1)}
        for idx in chosen:
            rules[ids[idx]] = body(idx)
        return Grammar.model_construct(rules=rules)


def search_minimal_grammar(text: str, budget: int) -> ExactSearch:
    """Run the exhaustive search after the length checks."""
    if not text:
        raise EmptyInputError("cannot infer a grammar for an empty text")
    if len(text) > budget:
        raise BudgetExceededError(
            f"text of length {len(text)} exceeds the exact search budget {budget}"
        )
    search = ExactSearch(text).run()
    logger.debug(
        "exact search for %r: %d candidates, %d nodes, length %d",
        text, len(search.candidates), search.nodes, search.best[0],
    )
    return search
