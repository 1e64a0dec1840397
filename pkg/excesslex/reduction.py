"""
Reduction of an admissible grammar to an irreducible one.

Each step strictly decreases the pair (grammar length, -rule count), so the
loop reaches a fixpoint:

* unreachable rules are dropped,
* rules used once are inlined,
* rules with equal expansions are merged,
* a repeated digram is replaced by a rule (reusing one whose body is the digram).

At the fixpoint no digram repeats, which rules out every repeated
sequence of length two or more.
"""

import logging
from typing import Dict, List, Tuple

from .grammar import (
    Grammar,
    Symbol,
    digram_occurrences,
    rule_expansions,
    topological_order,
    use_counts,
)

logger = logging.getLogger(__name__)

_Rules = Dict[int, List[Symbol]]


def _as_grammar(rules: _Rules) -> Grammar:
    return Grammar.model_construct(rules={k: tuple(v) for k, v in sorted(rules.items())})


def _drop_unreachable(rules: _Rules) -> bool:
    reachable = {0}
    pending = [0]
    while pending:
        for symbol in rules[pending.pop()]:
            if isinstance(symbol, int) and symbol not in reachable:
                reachable.add(symbol)
                pending.append(symbol)
    dropped = [rule_id for rule_id in rules if rule_id not in reachable]
    for rule_id in dropped:
        del rules[rule_id]
    return bool(dropped)


def _inline_underused(rules: _Rules) -> bool:
    counts = use_counts(_as_grammar(rules))
    once = {rule_id for rule_id, count in counts.items() if rule_id != 0 and count == 1}
    if not once:
        return False
    # children first, so every inlined body is already flat
    flat: Dict[int, List[Symbol]] = {}
    for rule_id in topological_order(_as_grammar(rules)):
        body: List[Symbol] = []
        for symbol in rules[rule_id]:
            if isinstance(symbol, int) and symbol in once:
                body.extend(flat[symbol])
            else:
                body.append(symbol)
        flat[rule_id] = body
    for rule_id in list(rules):
        if rule_id in once:
            del rules[rule_id]
        else:
            rules[rule_id] = flat[rule_id]
    return True


def _merge_duplicates(rules: _Rules) -> bool:
    expansions = rule_expansions(_as_grammar(rules))
    groups: Dict[str, List[int]] = {}
    for rule_id in sorted(expansions):
        groups.setdefault(expansions[rule_id], []).append(rule_id)

    mapping: Dict[int, int] = {}
    for ids in groups.values():
        if len(ids) < 2:
            continue
        members = set(ids)
        # a unit rule pointing into its own group cannot survive the merge
        keep = next(
            rule_id
            for rule_id in ids
            if not (len(rules[rule_id]) == 1 and rules[rule_id][0] in members)
        )
        for rule_id in ids:
            if rule_id != keep:
                mapping[rule_id] = keep
    if not mapping:
        return False
    for rule_id in mapping:
        del rules[rule_id]
    for rule_id, body in rules.items():
        rules[rule_id] = [mapping.get(s, s) if isinstance(s, int) else s for s in body]
    return True


def _extract_digram(rules: _Rules) -> bool:
    occurrences = digram_occurrences({k: tuple(v) for k, v in rules.items()})
    best = None
    for digram, places in occurrences.items():
        if len(places) < 2:
            continue
        key = (-len(places), places[0])
        if best is None or key < best[0]:
            best = (key, digram, places)
    if best is None:
        return False
    _, digram, places = best

    target = next(
        (
            rule_id
            for rule_id, body in rules.items()
            if rule_id != 0 and len(body) == 2 and tuple(body) == digram
        ),
        None,
    )
    if target is None:
        target = max(rules) + 1
        rules[target] = list(digram)
    else:
        places = [place for place in places if place[0] != target]

    by_rule: Dict[int, List[int]] = {}
    for rule_id, pos in places:
        by_rule.setdefault(rule_id, []).append(pos)
    for rule_id, positions in by_rule.items():
        body = rules[rule_id]
        for pos in sorted(positions, reverse=True):
            body[pos:pos + 2] = [target]
    logger.debug("extracted digram %r into rule %d (%d uses)", digram, target, len(places))
    return True


_STEPS = (_drop_unreachable, _inline_underused, _merge_duplicates, _extract_digram)


def reduce_to_irreducible(grammar: Grammar) -> Grammar:
    """Apply the reduction steps until none of them changes the grammar."""
    rules: _Rules = {k: list(v) for k, v in grammar.rules.items()}
    passes = 0
    while any(step(rules) for step in _STEPS):
        passes += 1
    if not passes:
        return grammar
    logger.debug("reduction reached a fixpoint after %d steps", passes)
    return _as_grammar(rules)


def reduction_potential(grammar: Grammar) -> Tuple[int, int]:
    """The quantity every reduction step decreases: (length, -rule count)."""
    return sum(len(p) for p in grammar.rules.values()), -len(grammar.rules)
