"""
Offline grammar inference by recursive pairing of the most frequent digram.

The working sequence is a doubly linked list over the original positions, so a
position keeps its index when its pair is replaced and the left-to-right order
of occurrences never changes. Digram counts are non-overlapping and
left-greedy inside runs ("aaa" holds one "aa").
"""

import heapq
import itertools
import logging
from typing import Dict, List, Set, Tuple

from .grammar import Grammar, Symbol

logger = logging.getLogger(__name__)

Pair = Tuple[Symbol, Symbol]


class RePair:
    """Most-frequent-pair replacement on one text."""

    def __init__(self, text: str):
        self.seq: List[Symbol] = list(text)
        size = len(self.seq)
        self.prev = list(range(-1, size - 1))
        self.next = list(range(1, size + 1))
        if size:
            self.next[-1] = -1
        self.alive = [True] * size
        self.positions: Dict[Pair, Set[int]] = {}
        self.rules: Dict[int, Pair] = {}
        self._heap: List[Tuple[int, int, int, Pair]] = []
        self._serial = itertools.count()

        for i in range(size - 1):
            self._add(i)

    def _pair_at(self, i: int) -> Pair:
        return self.seq[i], self.seq[self.next[i]]

    def _add(self, i: int) -> None:
        """Record the pair starting at ``i`` unless it overlaps its left twin."""
        if i < 0 or self.next[i] < 0:
            return
        pair = self._pair_at(i)
        places = self.positions.setdefault(pair, set())
        if pair[0] == pair[1] and self.prev[i] in places:
            return
        places.add(i)
        if len(places) >= 2:
            # -1 is a lower bound for the leftmost position; refreshed on pop
            heapq.heappush(self._heap, (-len(places), -1, next(self._serial), pair))

    def _discard(self, i: int) -> None:
        if i < 0 or self.next[i] < 0:
            return
        places = self.positions.get(self._pair_at(i))
        if places is not None:
            places.discard(i)

    def _valid_places(self, pair: Pair) -> List[int]:
        valid = []
        taken_end = -1
        for i in sorted(self.positions[pair]):
            if not self.alive[i] or i == taken_end or self.next[i] < 0:
                continue
            if self._pair_at(i) != pair:
                continue
            valid.append(i)
            taken_end = self.next[i]
        return valid

    def _pop_best(self):
        while self._heap:
            neg_count, first, _, pair = heapq.heappop(self._heap)
            places = self.positions.get(pair)
            if not places or len(places) < 2:
                continue
            if len(places) != -neg_count:
                heapq.heappush(self._heap, (-len(places), -1, next(self._serial), pair))
                continue
            leftmost = min(places)
            if leftmost != first:
                heapq.heappush(self._heap, (neg_count, leftmost, next(self._serial), pair))
                continue
            return pair
        return None

    def _recount_run(self, start: int) -> None:
        """Re-pick the left-greedy places of the run of equal symbols beginning at ``start``."""
        symbol = self.seq[start]
        places = self.positions.setdefault((symbol, symbol), set())
        take = True
        i = start
        while self.next[i] >= 0 and self.seq[self.next[i]] == symbol:
            if take:
                places.add(i)
            else:
                places.discard(i)
            take = not take
            i = self.next[i]
        if len(places) >= 2:
            heapq.heappush(self._heap, (-len(places), -1, next(self._serial), (symbol, symbol)))

    def _replace(self, pair: Pair, places: List[int], symbol: int) -> None:
        for i in places:
            j = self.next[i]
            k = self.next[j]
            p = self.prev[i]
            # j heads a run of equal symbols whose counted places shift once j is gone
            shifted = (
                k >= 0
                and self.seq[j] == self.seq[k]
                and j in self.positions.get((self.seq[j], self.seq[k]), ())
            )
            self._discard(p)
            self._discard(j)
            self.positions[pair].discard(i)

            self.seq[i] = symbol
            self.alive[j] = False
            self.next[i] = k
            if k >= 0:
                self.prev[k] = i

            self._add(p)
            self._add(i)
            if shifted:
                self._recount_run(k)

    def run(self) -> "RePair":
        symbol = 1
        while True:
            pair = self._pop_best()
            if pair is None:
                break
            places = self._valid_places(pair)
            if len(places) < 2:
                self.positions[pair] = set(places)
                continue
            self.rules[symbol] = pair
            self._replace(pair, places, symbol)
            symbol += 1
        logger.debug("pairing created %d rules", len(self.rules))
        return self

    def to_grammar(self) -> Grammar:
        start: List[Symbol] = []
        i = 0 if self.seq else -1
        while i >= 0:
            start.append(self.seq[i])
            i = self.next[i]
        rules = {0: tuple(start)}
        rules.update(self.rules)
        return Grammar.model_construct(rules=rules)
