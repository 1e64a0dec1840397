"""
Executable checks of grammar-length and excess-entropy inequalities.

Every check returns an InequalityCheckResult; a check passes when its
violation list is empty.
"""

import itertools
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, Field

from .config import settings
from .corpus import ROSE_CYCLE, SourceSpec, generate
from .entropy import (
    BlockEntropyTable,
    EmpiricalDistribution,
    excess_code_length,
    excess_entropy,
    iid_block_entropy,
    markov_block_entropy,
    periodic_block_entropy,
)
from .errors import BudgetExceededError, UnsupportedSourceError
from .infer import MAX_EXACT_LENGTH_BUDGET, minimal_grammar_exact
from .metrics import record_verification
from .repeats import longest_repeat

logger = logging.getLogger(__name__)

MARKOV_STAY = 0.9


class Violation(BaseModel):
    inputs: List[str] = Field(..., description="Strings or n-grams the inequality was tested on")
    relation: str = Field(..., description="The inequality that failed")
    lhs: float
    rhs: float


class InequalityCheckResult(BaseModel):
    """Outcome of one inequality check."""
    name: str
    instances_tested: int = 0
    violations: List[Violation] = Field(default_factory=list)
    details: List[Dict[str, float]] = Field(
        default_factory=list, description="Per-instance values where the check keeps them"
    )

    @property
    def passed(self) -> bool:
        return not self.violations


def _relabel(text: str) -> str:
    """Rename symbols by first occurrence; minimal lengths do not depend on names."""
    names: Dict[str, str] = {}
    return "".join(names.setdefault(ch, chr(ord("a") + len(names))) for ch in text)


def _orbit_key(text: str) -> str:
    """Representative under renaming and reversal, which keep grammar lengths."""
    return min(_relabel(text), _relabel(text[::-1]))


def _minimal_pair(text: str, budget: int) -> Tuple[int, int]:
    result = minimal_grammar_exact(text, budget)
    return result.length, result.vocabulary_length


def minimal_lengths(
    strings: Iterable[str], budget: Optional[int] = None
) -> Dict[str, Tuple[int, int]]:
    """(L^m, L_0^m) of every string, one exact search per renaming/reversal class."""
    budget = settings.exact_length_budget if budget is None else budget
    strings = sorted(set(strings), key=lambda s: (len(s), s))
    keys = {s: _orbit_key(s) for s in strings}
    todo = sorted(set(keys.values()), key=lambda s: (len(s), s))
    values = Parallel(n_jobs=settings.n_jobs)(
        delayed(_minimal_pair)(key, budget) for key in todo
    )
    solved = dict(zip(todo, values))
    logger.debug("solved %d exact searches for %d strings", len(todo), len(strings))
    return {s: solved[keys[s]] for s in strings}


def _strings(alphabet: str, max_length: int) -> List[str]:
    return [
        "".join(chars)
        for length in range(1, max_length + 1)
        for chars in itertools.product(alphabet, repeat=length)
    ]


def check_theorem3(alphabet_size: int, max_length: int) -> InequalityCheckResult:
    """Grammar-length inequalities over all pairs (v, u) with |vu| <= max_length."""
    budget = min(settings.exact_length_budget, MAX_EXACT_LENGTH_BUDGET)
    if max_length > budget:
        raise BudgetExceededError(
            f"pairs up to length {max_length} exceed the exact search budget {budget}"
        )
    alphabet = "".join(chr(ord("a") + i) for i in range(alphabet_size))
    halves = _strings(alphabet, max_length // 2)
    lengths = minimal_lengths(
        set(halves) | {v + u for v in halves for u in halves}, budget
    )

    violations: List[Violation] = []
    instances = 0
    for text, (length, _) in lengths.items():
        instances += 1
        if length > len(text):
            violations.append(Violation(inputs=[text], relation="L(v) <= |v|",
                                        lhs=length, rhs=len(text)))
    for v, u in itertools.product(halves, repeat=2):
        instances += 1
        vu = v + u
        joint, vocabulary = lengths[vu]
        repeat = longest_repeat(vu)
        for part in (v, u):
            if lengths[part][0] > joint + repeat:
                violations.append(Violation(inputs=[v, u], relation="L(part) <= L(vu) + L>1(vu)",
                                            lhs=lengths[part][0], rhs=joint + repeat))
        excess = lengths[v][0] + lengths[u][0] - joint
        if excess < 0:
            violations.append(Violation(inputs=[v, u], relation="0 <= L(v) + L(u) - L(vu)",
                                        lhs=0, rhs=excess))
        if excess > vocabulary + repeat:
            violations.append(Violation(inputs=[v, u], relation="L(v) + L(u) - L(vu) <= L0(vu) + L>1(vu)",
                                        lhs=excess, rhs=vocabulary + repeat))

    record_verification("theorem3", instances, len(violations))
    if violations:
        logger.warning("grammar-length inequalities: %d violations", len(violations))
    return InequalityCheckResult(name="theorem3", instances_tested=instances, violations=violations)


def _source(source: str, length: int, n_max: int, seed: int) -> Tuple[str, BlockEntropyTable]:
    if source == "periodic":
        text = generate(SourceSpec(kind="periodic", cycle=ROSE_CYCLE), length)
        return text, periodic_block_entropy(ROSE_CYCLE, n_max)
    if source == "iid":
        text = generate(SourceSpec(kind="iid", alphabet="ab", seed=seed), length)
        return text, iid_block_entropy([0.5, 0.5], n_max)
    if source == "markov":
        matrix = [[MARKOV_STAY, 1 - MARKOV_STAY], [1 - MARKOV_STAY, MARKOV_STAY]]
        text = generate(SourceSpec(kind="markov", alphabet="ab", matrix=matrix, seed=seed), length)
        return text, markov_block_entropy(matrix, n_max)
    raise UnsupportedSourceError(f"no analytic block entropy for source {source!r}")


def check_theorem2_synthetic(
    source: str,
    n_set: Sequence[int],
    algorithm: Optional[str] = None,
    samples: int = 8,
    seed: Optional[int] = None,
) -> InequalityCheckResult:
    """E^C(n) >= E(n) must hold for at least one tested n."""
    seed = settings.seed if seed is None else seed
    n_set = sorted(set(n_set))
    length = 2 * max(n_set) * samples
    text, table = _source(source, length, 2 * max(n_set), seed)
    exact = excess_entropy(table)

    details = []
    for n in n_set:
        code = excess_code_length(text, algorithm, n, samples)
        e = exact.value(n)
        details.append({"n": n, "E": e, "E_code": code.E_code, "holds": float(code.E_code >= e)})
        logger.info("%s n=%d: E=%.4f E_code=%.4f", source, n, e, code.E_code)

    violations = []
    if not any(row["holds"] for row in details):
        violations = [
            Violation(inputs=[f"{source}:n={int(row['n'])}"], relation="E_code(n) >= E(n)",
                      lhs=row["E_code"], rhs=row["E"])
            for row in details
        ]
    record_verification("theorem2", len(details), len(violations))
    return InequalityCheckResult(
        name=f"theorem2:{source}",
        instances_tested=len(details),
        violations=violations,
        details=details,
    )


def check_stationarity(dist: EmpiricalDistribution) -> InequalityCheckResult:
    """Left and right marginals of (n+1)-gram counts equal the n-gram counts."""
    violations: List[Violation] = []
    instances = 1
    total = int(dist.count_array(1).sum())
    if total != dist.total(1):
        violations.append(Violation(inputs=[""], relation="sum_a P(a) = 1",
                                    lhs=total / dist.total(1), rhs=1.0))

    size = dist.source_length
    for n in range(1, dist.n_max):
        counts = dist.count_array(n)
        extended = dist.count_array(n + 1)
        starts = dist.representatives(n + 1)
        shorter = dist.classes(n)
        prefix = shorter[starts]
        follow = (starts + 1) % size if dist.window_mode == "circular" else starts + 1
        suffix = shorter[follow]
        right = np.bincount(prefix, weights=extended, minlength=len(counts))
        left = np.bincount(suffix, weights=extended, minlength=len(counts))
        for cls in range(len(counts)):
            instances += 2
            for relation, value in (("sum_a P(va) = P(v)", right[cls]), ("sum_a P(av) = P(v)", left[cls])):
                if int(value) != int(counts[cls]):
                    ngram = dist.ngram(n, int(dist.representatives(n)[cls]))
                    violations.append(Violation(inputs=[ngram], relation=relation,
                                                lhs=float(value), rhs=float(counts[cls])))

    record_verification("stationarity", instances, len(violations))
    return InequalityCheckResult(name="stationarity", instances_tested=instances, violations=violations)
