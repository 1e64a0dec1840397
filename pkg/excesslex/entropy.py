"""
Empirical n-gram distributions, block entropy and excess entropy.

N-gram classes are built the prefix-doubling way, one symbol at a time: the
class of the (n+1)-gram at position i is the rank of the pair (class of the
n-gram at i, symbol at i+n). Circular windows wrap around the text end, which
makes the marginal consistency of the counts exact on finite samples.
"""

import logging
from typing import Dict, List, Literal, Mapping, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .errors import ExcessLexError, TextTooShortError, UnsupportedSourceError

logger = logging.getLogger(__name__)

WindowMode = Literal["circular", "linear"]


class EmpiricalDistribution:
    """N-gram counts of one text for every 1 <= n <= n_max."""

    def __init__(self, text: str, n_max: int, window_mode: WindowMode = "circular"):
        if n_max < 1:
            raise ExcessLexError("n_max must be at least 1")
        self.text = text
        self.source_length = len(text)
        self.n_max = n_max
        self.window_mode = window_mode
        self.alphabet = sorted(set(text))

        index = {ch: i for i, ch in enumerate(self.alphabet)}
        symbols = np.fromiter((index[ch] for ch in text), dtype=np.int64, count=len(text))
        k = max(len(self.alphabet), 1)

        self._classes: Dict[int, np.ndarray] = {}
        self._counts: Dict[int, np.ndarray] = {}
        self._first: Dict[int, np.ndarray] = {}
        self._strings: Dict[int, Dict[str, int]] = {}

        current = symbols
        for n in range(1, n_max + 1):
            if n > 1:
                if window_mode == "circular":
                    current = current * k + np.roll(symbols, -(n - 1))
                else:
                    current = current[:-1] * k + symbols[n - 1:]
            _, first, inverse, counts = np.unique(
                current, return_index=True, return_inverse=True, return_counts=True
            )
            current = inverse.reshape(-1).astype(np.int64)
            self._classes[n] = current
            self._counts[n] = counts.astype(np.int64)
            self._first[n] = first
        logger.debug(
            "built %s distribution over %d symbols up to n=%d",
            window_mode, self.source_length, n_max,
        )

    def total(self, n: int) -> int:
        """Number of windows of length ``n``."""
        if self.window_mode == "circular":
            return self.source_length
        return self.source_length - n + 1

    def classes(self, n: int) -> np.ndarray:
        """Dense n-gram class of every window start."""
        return self._classes[n]

    def count_array(self, n: int) -> np.ndarray:
        """Counts per n-gram class, classes in lexicographic order."""
        return self._counts[n]

    def representatives(self, n: int) -> np.ndarray:
        """First window start of every n-gram class."""
        return self._first[n]

    def ngram(self, n: int, start: int) -> str:
        if self.window_mode == "circular":
            laps = n // max(self.source_length, 1) + 2
            return (self.text * laps)[start:start + n]
        return self.text[start:start + n]

    def counts(self, n: int) -> Dict[str, int]:
        """Map from every observed n-gram to its count."""
        if n not in self._strings:
            self._strings[n] = {
                self.ngram(n, int(start)): int(count)
                for start, count in zip(self._first[n], self._counts[n])
            }
        return self._strings[n]

    def probability(self, ngram: str) -> float:
        n = len(ngram)
        return self.counts(n).get(ngram, 0) / self.total(n)

    def entropy(self, n: int) -> float:
        """Plug-in entropy of the n-gram distribution in bits."""
        counts = self._counts[n].astype(np.float64)
        total = float(self.total(n))
        return float(np.log2(total) - np.sum(counts * np.log2(counts)) / total)


def build_distribution(
    text: str, n_max: int, window_mode: WindowMode = "circular"
) -> EmpiricalDistribution:
    """Count all n-grams of ``text`` for 1 <= n <= n_max."""
    if n_max < 1 or len(text) < n_max:
        raise TextTooShortError(
            f"text of length {len(text)} is too short for n-grams up to {n_max}"
        )
    return EmpiricalDistribution(text, n_max, window_mode)


class BlockEntropyRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=0)
    H: float = Field(..., description="Block entropy in bits")
    H_prime: Optional[float] = Field(None, description="H(n) - H(n-1)")
    H_double_prime: Optional[float] = Field(None, description="H(n) - 2H(n-1) + H(n-2)")
    distinct: Optional[int] = Field(None, description="Distinct n-grams observed")
    reliable: bool = Field(True, description="Sample length at least 2^H(n)")


class BlockEntropyTable(BaseModel):
    """Block entropies H(0..n_max) with differences and reliability flags."""
    model_config = ConfigDict(frozen=True)

    rows: List[BlockEntropyRow]
    source_length: Optional[int] = Field(None, description="None for analytic tables")

    @classmethod
    def from_entropies(
        cls,
        entropies: Mapping[int, float],
        source_length: Optional[int] = None,
        distinct: Optional[Mapping[int, int]] = None,
    ) -> "BlockEntropyTable":
        """Build rows from H values; H(0) = 0 is added when absent."""
        values = dict(entropies)
        values.setdefault(0, 0.0)
        rows = []
        for n in sorted(values):
            h = values[n]
            h1 = values.get(n - 1)
            h2 = values.get(n - 2)
            rows.append(BlockEntropyRow(
                n=n,
                H=h,
                H_prime=None if h1 is None else h - h1,
                H_double_prime=None if h1 is None or h2 is None else h - 2 * h1 + h2,
                distinct=None if distinct is None else distinct.get(n),
                reliable=source_length is None or source_length >= 2.0 ** h,
            ))
        return cls(rows=rows, source_length=source_length)

    def entropy(self, n: int) -> float:
        for row in self.rows:
            if row.n == n:
                return row.H
        raise KeyError(n)

    def as_dict(self) -> Dict[int, float]:
        return {row.n: row.H for row in self.rows}

    @property
    def n_max(self) -> int:
        return max(row.n for row in self.rows)


def block_entropy(dist: EmpiricalDistribution) -> BlockEntropyTable:
    """Plug-in block entropy table of a distribution."""
    entropies = {n: dist.entropy(n) for n in range(1, dist.n_max + 1)}
    distinct = {0: 1}
    distinct.update({n: len(dist.count_array(n)) for n in range(1, dist.n_max + 1)})
    return BlockEntropyTable.from_entropies(
        entropies, source_length=dist.source_length, distinct=distinct
    )


class ExcessEntropyRow(BaseModel):
    n: int
    E: float = Field(..., description="2H(n) - H(2n) in bits")


class CodeExcessRow(BaseModel):
    n: int
    E_code: float = Field(..., description="Mean |C(v)| + |C(u)| - |C(vu)| in bits")
    samples: int


class ExcessEntropySeries(BaseModel):
    """Finite-order excess entropies, optionally with code-based estimates."""
    rows: List[ExcessEntropyRow] = Field(default_factory=list)
    code_rows: List[CodeExcessRow] = Field(default_factory=list)

    def value(self, n: int) -> float:
        for row in self.rows:
            if row.n == n:
                return row.E
        raise KeyError(n)


def excess_entropy(table: BlockEntropyTable) -> ExcessEntropySeries:
    """E(n) = 2H(n) - H(2n) for every n >= 1 whose doubled length is tabulated."""
    values = table.as_dict()
    rows = [
        ExcessEntropyRow(n=n, E=2 * values[n] - values[2 * n])
        for n in sorted(values)
        if n >= 1 and 2 * n in values
    ]
    return ExcessEntropySeries(rows=rows)


class EntropyRateEstimate(BaseModel):
    h_from_blocks: float = Field(..., description="H'(n_max), biased upwards")
    h_from_code: Optional[float] = Field(None, description="Bits per character of the grammar code")


def entropy_rate(
    table: BlockEntropyTable, text: Optional[str] = None, algorithm: Optional[str] = None
) -> EntropyRateEstimate:
    """Entropy rate from block differences and, given a text, from the code rate."""
    last = max(table.rows, key=lambda row: row.n)
    h_blocks = last.H_prime if last.H_prime is not None else last.H
    h_code = None
    if text:
        from .codec import code_length_report

        h_code = code_length_report(text, algorithm).bits_per_character
    return EntropyRateEstimate(h_from_blocks=h_blocks, h_from_code=h_code)


def _window_offsets(text_length: int, width: int, samples: int) -> List[int]:
    if samples < 1:
        raise ExcessLexError("samples must be at least 1")
    if text_length < width * samples:
        raise TextTooShortError(
            f"text of length {text_length} cannot hold {samples} windows of length {width}"
        )
    if samples == 1:
        return [0]
    return [int(x) for x in np.linspace(0, text_length - width, samples).round()]


def excess_code_length(
    text: str, algorithm: Optional[str], n: int, samples: int
) -> CodeExcessRow:
    """Mean |C(v)| + |C(u)| - |C(vu)| over adjacent window pairs of length n."""
    from .codec import code_length

    values = []
    for offset in _window_offsets(len(text), 2 * n, samples):
        v = text[offset:offset + n]
        u = text[offset + n:offset + 2 * n]
        values.append(code_length(v, algorithm) + code_length(u, algorithm) - code_length(v + u, algorithm))
    return CodeExcessRow(n=n, E_code=float(np.mean(values)), samples=len(values))


def expected_code_length(text: str, algorithm: Optional[str], n: int, samples: int) -> float:
    """Mean |C(v)| over evenly spaced windows of length n."""
    from .codec import code_length

    return float(np.mean([
        code_length(text[offset:offset + n], algorithm)
        for offset in _window_offsets(len(text), n, samples)
    ]))


def excess_entropy_lower_bound(table: BlockEntropyTable) -> float:
    """H(1) - h, with h taken from the block differences of the table."""
    return table.entropy(1) - entropy_rate(table).h_from_blocks


# Exact tables of synthetic sources

def iid_block_entropy(probabilities: Sequence[float], n_max: int) -> BlockEntropyTable:
    """H(n) = n H(1) for an IID source."""
    p = np.asarray(probabilities, dtype=np.float64)
    if p.ndim != 1 or np.any(p < 0) or not np.isclose(p.sum(), 1.0):
        raise UnsupportedSourceError("probabilities must be a distribution")
    p = p[p > 0]
    h1 = float(-np.sum(p * np.log2(p)))
    return BlockEntropyTable.from_entropies({n: n * h1 for n in range(1, n_max + 1)})


def periodic_block_entropy(cycle: str, n_max: int) -> BlockEntropyTable:
    """Block entropy of a periodic source started at a uniformly random phase."""
    if not cycle:
        raise UnsupportedSourceError("periodic source needs a non-empty cycle")
    dist = EmpiricalDistribution(cycle, n_max, "circular")
    return BlockEntropyTable.from_entropies({n: dist.entropy(n) for n in range(1, n_max + 1)})


def markov_stationary(matrix: Sequence[Sequence[float]]) -> np.ndarray:
    """Stationary distribution of a row-stochastic matrix."""
    p = np.asarray(matrix, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != p.shape[1] or np.any(p < 0):
        raise UnsupportedSourceError("transition matrix must be square and non-negative")
    if not np.allclose(p.sum(axis=1), 1.0):
        raise UnsupportedSourceError("transition matrix rows must sum to one")
    values, vectors = np.linalg.eig(p.T)
    vector = np.real(vectors[:, np.argmin(np.abs(values - 1.0))])
    return vector / vector.sum()


def _entropy_bits(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def markov_block_entropy(matrix: Sequence[Sequence[float]], n_max: int) -> BlockEntropyTable:
    """H(n) = H(pi) + (n - 1) sum_i pi_i H(P_i) for a stationary first-order chain."""
    p = np.asarray(matrix, dtype=np.float64)
    pi = markov_stationary(p)
    conditional = float(sum(pi[i] * _entropy_bits(p[i]) for i in range(len(pi))))
    h1 = _entropy_bits(pi)
    return BlockEntropyTable.from_entropies(
        {n: h1 + (n - 1) * conditional for n in range(1, n_max + 1)}
    )


def hilberg_block_entropy(
    h0: float, h_mu: float, mu: float, h: float, n_values: Sequence[int]
) -> BlockEntropyTable:
    """H(n) = h0 + h_mu n^mu + h n at the given n, with H(0) = 0."""
    return BlockEntropyTable.from_entropies(
        {int(n): h0 + h_mu * n ** mu + h * n for n in n_values if n >= 1}
    )
