"""Word-level laws: rank-frequency, vocabulary growth, boundaries and Menzerath."""

import logging
import math
from collections import Counter
from typing import Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, Field
from sklearn.linear_model import LinearRegression

from .config import get_prefix_schedule, settings
from .errors import EmptyInputError, ExcessLexError, InsufficientDataError, LengthMismatchError
from .grammar import Grammar, Tokenization, rule_expansions, rule_lengths, tokenize, vocabulary_length
from .infer import InferenceConfig, infer

logger = logging.getLogger(__name__)

MIN_ZIPF_TYPES = 10
MIN_GROWTH_POINTS = 5
MIN_MENZERATH_RULES = 5


def _loglog_fit(x: Sequence[float], y: Sequence[float]) -> Tuple[float, float, float]:
    """Slope, intercept and sse of log y against log x."""
    lx = np.log(np.asarray(x, dtype=np.float64)).reshape(-1, 1)
    ly = np.log(np.asarray(y, dtype=np.float64))
    if np.ptp(lx) == 0:
        return 0.0, float(ly.mean()), float(np.sum((ly - ly.mean()) ** 2))
    model = LinearRegression().fit(lx, ly)
    sse = float(np.sum((model.predict(lx) - ly) ** 2))
    return float(model.coef_[0]), float(model.intercept_), sse


# Rank-frequency

class RankFrequencyRow(BaseModel):
    token: str
    count: int = Field(..., ge=1)
    rank: int = Field(..., ge=1)


class RankFrequencyTable(BaseModel):
    """Types sorted by decreasing count; ties in lexicographic token order."""
    rows: List[RankFrequencyRow]
    V: int = Field(..., description="Number of types")
    N: int = Field(..., description="Number of tokens")

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> "RankFrequencyTable":
        ordered = sorted(
            ((token, count) for token, count in counts.items() if count > 0),
            key=lambda item: (-item[1], item[0]),
        )
        if not ordered:
            raise EmptyInputError("no tokens to rank")
        rows = [
            RankFrequencyRow(token=token, count=count, rank=rank)
            for rank, (token, count) in enumerate(ordered, start=1)
        ]
        return cls(rows=rows, V=len(rows), N=sum(count for _, count in ordered))

    def counts(self) -> np.ndarray:
        return np.array([row.count for row in self.rows], dtype=np.float64)


def rank_frequency(tokens: Iterable[str]) -> RankFrequencyTable:
    """Count tokens and rank them."""
    return RankFrequencyTable.from_counts(Counter(tokens))


class ZipfFit(BaseModel):
    """Single power law and best two-regime power law in log-log space."""
    single_B: float
    B1: float
    B2: float
    R1: int = Field(..., description="Breakpoint rank shared by both regimes")
    sse_single: float
    sse_two: float


def _segment_sse(prefix: np.ndarray, start: np.ndarray, end: np.ndarray):
    """Slope and sse of the least-squares line on points [start, end)."""
    n, sx, sy, sxx, syy, sxy = (prefix[:, end] - prefix[:, start])
    cxx = sxx - sx * sx / n
    cxy = sxy - sx * sy / n
    cyy = syy - sy * sy / n
    slope = np.divide(cxy, cxx, out=np.zeros_like(cxy), where=cxx > 0)
    return slope, np.maximum(cyy - slope * cxy, 0.0)


def fit_zipf(table: RankFrequencyTable) -> ZipfFit:
    """Fit c(w) ~ r(w)^-B with one exponent and with two regimes."""
    if table.V < MIN_ZIPF_TYPES:
        raise InsufficientDataError(f"{table.V} types, at least {MIN_ZIPF_TYPES} needed")
    x = np.log(np.arange(1, table.V + 1, dtype=np.float64))
    y = np.log(table.counts())

    model = LinearRegression().fit(x.reshape(-1, 1), y)
    sse_single = float(np.sum((model.predict(x.reshape(-1, 1)) - y) ** 2))

    stats = np.vstack([np.ones_like(x), x, y, x * x, y * y, x * y])
    prefix = np.hstack([np.zeros((6, 1)), np.cumsum(stats, axis=1)])
    # both regimes include the breakpoint rank R1
    r1 = np.arange(2, table.V)
    slope1, sse1 = _segment_sse(prefix, np.zeros_like(r1), r1)
    slope2, sse2 = _segment_sse(prefix, r1 - 1, np.full_like(r1, table.V))
    total = sse1 + sse2
    best = int(np.argmin(total))
    return ZipfFit(
        single_B=float(-model.coef_[0]),
        B1=float(-slope1[best]),
        B2=float(-slope2[best]),
        R1=int(r1[best]),
        sse_single=sse_single,
        sse_two=float(total[best]),
    )


# Vocabulary growth

class GrowthPoint(BaseModel):
    N: int
    V: int


class GrowthCurve(BaseModel):
    """(N, V) points with the fitted log-log exponent."""
    points: List[GrowthPoint]
    exponent: float = Field(..., description="rho for word types, alpha for grammar vocabularies")
    intercept: float
    sse: float = 0.0
    comparison: List[float] = Field(
        default_factory=list, description="const * N^0.5 / log N at every point"
    )


def _fit_curve(points: List[GrowthPoint]) -> GrowthCurve:
    kept: List[GrowthPoint] = []
    for point in points:
        if point.N > 0 and point.V > 0 and (not kept or point.N > kept[-1].N):
            kept.append(point)
    if len(kept) < MIN_GROWTH_POINTS:
        raise InsufficientDataError(
            f"{len(kept)} growth points, at least {MIN_GROWTH_POINTS} needed"
        )
    slope, intercept, sse = _loglog_fit([p.N for p in kept], [p.V for p in kept])
    return GrowthCurve(points=kept, exponent=slope, intercept=intercept, sse=sse)


def reference_tokens(text: str) -> List[str]:
    """Space-to-space words."""
    return text.split()


def grammar_tokens(grammar: Grammar) -> List[str]:
    """Strings of the depth-1 nonterminal tokens, in text order."""
    expansions = rule_expansions(grammar, root=0)
    return [expansions[span.rule_id] for span in tokenize(grammar, max_depth=1).at_depth(1)]


def _prefix_tokens(text: str, length: int, tokenizer: str) -> List[str]:
    prefix = text[:length]
    if tokenizer == "spaces":
        tokens = reference_tokens(prefix)
        # a word cut by the prefix end is not counted
        if tokens and length < len(text) and not text[length].isspace() and not prefix[-1].isspace():
            tokens.pop()
        return tokens
    if tokenizer.startswith("grammar:"):
        algorithm = tokenizer.split(":", 1)[1]
        return grammar_tokens(infer(prefix, InferenceConfig(algorithm=algorithm)))
    raise ExcessLexError(f"unknown tokenizer {tokenizer!r}")


def _growth_point(text: str, length: int, tokenizer: str) -> GrowthPoint:
    tokens = _prefix_tokens(text, length, tokenizer)
    return GrowthPoint(N=len(tokens), V=len(set(tokens)))


def guiraud_curve(
    text: str, schedule: Optional[Sequence[int]] = None, tokenizer: str = "spaces"
) -> GrowthCurve:
    """Types against tokens over a geometric schedule of prefixes."""
    schedule = list(schedule) if schedule is not None else get_prefix_schedule(len(text))
    points = Parallel(n_jobs=settings.n_jobs)(
        delayed(_growth_point)(text, length, tokenizer) for length in schedule
    )
    curve = _fit_curve(points)
    logger.info("Guiraud exponent %.3f over %d points", curve.exponent, len(curve.points))
    return curve


def token_growth_curve(tokens: Sequence[str], schedule: Sequence[int]) -> GrowthCurve:
    """Types against tokens for prefixes of a token sequence."""
    points = [
        GrowthPoint(N=min(n, len(tokens)), V=len(set(tokens[:n]))) for n in schedule
    ]
    return _fit_curve(points)


def _vocab_point(text: str, length: int, algorithm: Optional[str]) -> GrowthPoint:
    config = InferenceConfig(algorithm=algorithm) if algorithm else InferenceConfig()
    return GrowthPoint(N=length, V=vocabulary_length(infer(text[:length], config)))


def grammar_vocab_growth(
    text: str, schedule: Optional[Sequence[int]] = None, algorithm: Optional[str] = None
) -> GrowthCurve:
    """Vocabulary length of inferred grammars against prefix length."""
    schedule = list(schedule) if schedule is not None else get_prefix_schedule(len(text))
    points = Parallel(n_jobs=settings.n_jobs)(
        delayed(_vocab_point)(text, length, algorithm) for length in schedule
    )
    curve = _fit_curve(points)

    def shape(n: int) -> float:
        return math.sqrt(n) / math.log(n) if n > 1 else 1.0

    first = curve.points[0]
    const = first.V / shape(first.N)
    comparison = [const * shape(p.N) for p in curve.points]
    logger.info("vocabulary growth exponent %.3f over %d points", curve.exponent, len(curve.points))
    return curve.model_copy(update={"comparison": comparison})


# Boundaries

class BoundaryScore(BaseModel):
    """Agreement of predicted cuts with reference cuts."""
    precision: float = Field(..., ge=0, le=1)
    recall: float = Field(..., ge=0, le=1)
    f1: float = Field(..., ge=0, le=1)
    predicted: int
    reference: int
    matched: int
    precision_undefined: bool = Field(False, description="No cuts were predicted")


def boundary_agreement(
    predicted: Union[Tokenization, Set[int]],
    reference: Set[int],
    text_length: int,
) -> BoundaryScore:
    """Precision, recall and F1 of cuts strictly inside the text."""
    if isinstance(predicted, Tokenization):
        if predicted.text_length != text_length:
            raise LengthMismatchError(
                f"tokenization covers {predicted.text_length} symbols, reference {text_length}"
            )
        cuts = predicted.boundaries()
    else:
        cuts = {c for c in predicted if 0 < c < text_length}
    if any(c < 0 or c > text_length for c in reference):
        raise LengthMismatchError("reference boundary outside the text")
    ref = {c for c in reference if 0 < c < text_length}

    matched = len(cuts & ref)
    undefined = not cuts
    precision = 1.0 if undefined else matched / len(cuts)
    recall = matched / len(ref) if ref else 1.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return BoundaryScore(
        precision=precision,
        recall=recall,
        f1=f1,
        predicted=len(cuts),
        reference=len(ref),
        matched=matched,
        precision_undefined=undefined,
    )


def random_boundary_baseline(text_length: int, count: int, seed: int) -> Set[int]:
    """``count`` distinct cuts drawn uniformly from the inner positions."""
    inner = max(text_length - 1, 0)
    if count > inner:
        raise ExcessLexError(f"cannot place {count} cuts in a text of length {text_length}")
    rng = np.random.Generator(np.random.PCG64(seed))
    return {int(c) for c in rng.choice(np.arange(1, text_length), size=count, replace=False)}


# Menzerath

class MenzerathRow(BaseModel):
    rule_id: int
    construct_length: int = Field(..., ge=1, description="Symbols in the production")
    mean_constituent_length: float = Field(..., ge=1, description="Terminals per symbol")


class MenzerathTable(BaseModel):
    rows: List[MenzerathRow]
    slope: float = Field(..., description="log-log slope of constituent length on construct length")
    intercept: float


def menzerath(grammar: Grammar) -> MenzerathTable:
    """Construct length against mean constituent length over non-initial rules."""
    if grammar.rule_count < MIN_MENZERATH_RULES:
        raise InsufficientDataError(
            f"{grammar.rule_count} rules, at least {MIN_MENZERATH_RULES} needed"
        )
    lengths = rule_lengths(grammar)
    rows = []
    for rule_id in sorted(grammar.rules):
        if rule_id == 0:
            continue
        production = grammar.rules[rule_id]
        constituents = [lengths[s] if isinstance(s, int) else 1 for s in production]
        rows.append(MenzerathRow(
            rule_id=rule_id,
            construct_length=len(production),
            mean_constituent_length=sum(constituents) / len(constituents),
        ))
    slope, intercept, _ = _loglog_fit(
        [r.construct_length for r in rows], [r.mean_constituent_length for r in rows]
    )
    return MenzerathTable(rows=rows, slope=slope, intercept=intercept)
