"""
Online grammar inference by digram uniqueness and rule utility.

Each rule is a circular doubly linked list closed by a guard symbol. The
digram index maps every digram in the grammar to its (single) indexed
occurrence; appending a symbol that repeats a digram either reuses the rule
whose whole body is that digram or creates a new rule for it.
"""

from typing import Dict, List, Optional, Tuple

from .grammar import Grammar


class _Rule:
    """A nonterminal: its guard closes the circular list of its production."""
    __slots__ = ("guard", "count")

    def __init__(self) -> None:
        self.guard = _Symbol(None, owner=self)
        self.guard.prev = self.guard
        self.guard.next = self.guard
        self.count = 0

    @property
    def first(self) -> "_Symbol":
        return self.guard.next

    @property
    def last(self) -> "_Symbol":
        return self.guard.prev

    def __iter__(self):
        sym = self.first
        while not sym.is_guard:
            yield sym.value
            sym = sym.next


class _Symbol:
    """A terminal (str), a nonterminal (_Rule) or a guard (None)."""
    __slots__ = ("value", "owner", "prev", "next")

    def __init__(self, value, owner: Optional[_Rule] = None) -> None:
        self.value = value
        self.owner = owner
        self.prev: Optional[_Symbol] = None
        self.next: Optional[_Symbol] = None

    @property
    def is_guard(self) -> bool:
        return self.value is None

    @property
    def is_nonterminal(self) -> bool:
        return isinstance(self.value, _Rule)

    def __repr__(self):
        return "<_Symbol value=%r>" % (self.value,)


class Sequitur:
    """Incrementally maintained grammar for the text fed so far."""

    def __init__(self) -> None:
        self.start = _Rule()
        self._index: Dict[Tuple[object, object], _Symbol] = {}

    def feed(self, character: str) -> None:
        """Append a single character to the text."""
        self._insert_after(self.start.last, _Symbol(character))
        self._check(self.start.last.prev)

    def extend(self, text: str) -> None:
        for character in text:
            self.feed(character)

    # linked list maintenance

    def _new_symbol(self, value) -> _Symbol:
        if isinstance(value, _Rule):
            value.count += 1
        return _Symbol(value)

    def _join(self, left: _Symbol, right: _Symbol) -> None:
        if left.next is not None:
            self._delete_digram(left)
            # inside runs of three equal symbols the surviving occurrence stays indexed
            if (
                not right.is_guard
                and right.prev is not None
                and right.next is not None
                and right.value == right.prev.value == right.next.value
            ):
                self._index[(right.value, right.next.value)] = right
            if (
                not left.is_guard
                and left.prev is not None
                and left.next is not None
                and left.value == left.next.value == left.prev.value
            ):
                self._index[(left.prev.value, left.value)] = left.prev
        left.next = right
        right.prev = left

    def _insert_after(self, left: _Symbol, new: _Symbol) -> None:
        self._join(new, left.next)
        self._join(left, new)

    def _remove(self, sym: _Symbol) -> None:
        self._join(sym.prev, sym.next)
        if not sym.is_guard:
            self._delete_digram(sym)
            if sym.is_nonterminal:
                sym.value.count -= 1

    def _delete_digram(self, sym: _Symbol) -> None:
        if sym.is_guard or sym.next.is_guard:
            return
        key = (sym.value, sym.next.value)
        if self._index.get(key) is sym:
            del self._index[key]

    # grammar constraints

    def _check(self, sym: _Symbol) -> bool:
        """Enforce digram uniqueness for the digram starting at ``sym``."""
        if sym.is_guard or sym.next.is_guard:
            return False
        key = (sym.value, sym.next.value)
        found = self._index.get(key)
        if found is None:
            self._index[key] = sym
            return False
        if found is sym:
            return False
        if found.next is not sym:
            self._match(sym, found)
        return True

    def _match(self, new: _Symbol, old: _Symbol) -> None:
        if old.prev.is_guard and old.next.next.is_guard:
            # the digram is the whole body of an existing rule
            rule = old.prev.owner
            self._substitute(new, rule)
        else:
            rule = _Rule()
            self._insert_after(rule.last, self._new_symbol(new.value))
            self._insert_after(rule.last, self._new_symbol(new.next.value))
            self._substitute(old, rule)
            self._substitute(new, rule)
            self._index[(rule.first.value, rule.first.next.value)] = rule.first
        first = rule.first
        if first.is_nonterminal and first.value.count == 1:
            self._expand(first)

    def _substitute(self, sym: _Symbol, rule: _Rule) -> None:
        """Replace the digram starting at ``sym`` with a reference to ``rule``."""
        q = sym.prev
        self._remove(q.next)
        self._remove(q.next)
        self._insert_after(q, self._new_symbol(rule))
        if not self._check(q):
            self._check(q.next)

    def _expand(self, sym: _Symbol) -> None:
        """Inline a rule that is referenced only once."""
        left, right = sym.prev, sym.next
        rule = sym.value
        first, last = rule.first, rule.last

        self._join(last, first)  # unlink the guard
        self._delete_digram(sym)
        self._join(left, right)

        self._join(left, first)
        self._join(last, right)
        if not right.is_guard:
            self._index[(last.value, right.value)] = last

    # export

    def to_grammar(self) -> Grammar:
        """Rules reachable from the start rule, numbered by first use."""
        numbers: Dict[_Rule, int] = {self.start: 0}
        rules: Dict[int, tuple] = {}
        pending: List[_Rule] = [self.start]
        while pending:
            rule = pending.pop()
            production = []
            for value in rule:
                if isinstance(value, _Rule):
                    if value not in numbers:
                        numbers[value] = len(numbers)
                        pending.append(value)
                    production.append(numbers[value])
                else:
                    production.append(value)
            rules[numbers[rule]] = tuple(production)
        return Grammar.model_construct(rules=dict(sorted(rules.items())))
