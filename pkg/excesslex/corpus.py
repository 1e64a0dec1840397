"""Text ingestion, normalization and deterministic synthetic sources."""

import hashlib
import json
import logging
import unicodedata
from pathlib import Path
from typing import List, Literal, Optional, Set, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from .entropy import markov_stationary
from .errors import EmptyInputError, InvalidEncodingError, InvalidSpecError

logger = logging.getLogger(__name__)

# Sequence "the rose is a hose is a rose is a hose ..." with spaces as "_"
ROSE_PREFIX = "the_rose_is"
ROSE_CYCLE = "_a_hose_is_a_rose_is"


class NormalizationProfile(BaseModel):
    """How raw text becomes a terminal string."""
    lowercase: bool = True
    strip_non_letters: bool = True
    remove_spaces: bool = True
    keep_space_as_terminal: bool = False

    @model_validator(mode="after")
    def _exclusive_space_modes(self):
        if self.remove_spaces and self.keep_space_as_terminal:
            raise ValueError("remove_spaces and keep_space_as_terminal are mutually exclusive")
        return self

    def digest(self) -> str:
        return hashlib.sha256(self.model_dump_json().encode("utf-8")).hexdigest()


class Provenance(BaseModel):
    source: str = Field(..., description="Path of the ingested file, or '<memory>'")
    source_sha256: str
    profile_hash: str

    @property
    def combined(self) -> str:
        return hashlib.sha256((self.source_sha256 + self.profile_hash).encode()).hexdigest()


class CorpusBundle(BaseModel):
    """Normalized text with the word boundaries its spaces marked."""
    normalized_text: str
    reference_boundaries: List[int] = Field(
        ..., description="Sorted cuts strictly inside the normalized text"
    )
    provenance: Provenance

    @property
    def boundary_set(self) -> Set[int]:
        return set(self.reference_boundaries)


def load_profile(path: Union[str, Path]) -> NormalizationProfile:
    """Read a JSON profile document."""
    return NormalizationProfile.model_validate_json(Path(path).read_text(encoding="utf-8"))


def _words(text: str, profile: NormalizationProfile) -> List[str]:
    text = unicodedata.normalize("NFC", text)
    if profile.lowercase:
        text = text.lower()
    if profile.strip_non_letters:
        text = "".join(
            ch for ch in text if ch.isspace() or unicodedata.category(ch).startswith("L")
        )
    return text.split()


def normalize(text: str, profile: Optional[NormalizationProfile] = None) -> Tuple[str, List[int]]:
    """Normalized text and the cuts between former space-separated runs."""
    profile = profile or NormalizationProfile()
    words = _words(text, profile)
    if profile.remove_spaces:
        separator = ""
    elif profile.keep_space_as_terminal:
        separator = "_"
    else:
        separator = " "
    cuts = []
    position = 0
    for word in words[:-1]:
        position += len(word)
        cuts.append(position)
        if separator:
            position += len(separator)
            cuts.append(position)
    return separator.join(words), cuts


def ingest_bytes(
    data: bytes, profile: Optional[NormalizationProfile] = None, source: str = "<memory>"
) -> CorpusBundle:
    profile = profile or NormalizationProfile()
    try:
        raw = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InvalidEncodingError(f"{source} is not valid UTF-8", exc.start) from exc
    text, cuts = normalize(raw, profile)
    if not text:
        raise EmptyInputError(f"{source} contains no symbols after normalization")
    logger.debug("ingested %s: %d symbols, %d cuts", source, len(text), len(cuts))
    return CorpusBundle(
        normalized_text=text,
        reference_boundaries=cuts,
        provenance=Provenance(
            source=source,
            source_sha256=hashlib.sha256(data).hexdigest(),
            profile_hash=profile.digest(),
        ),
    )


def ingest(path: Union[str, Path], profile: Optional[NormalizationProfile] = None) -> CorpusBundle:
    """Read, normalize and record reference boundaries of a UTF-8 file."""
    path = Path(path)
    return ingest_bytes(path.read_bytes(), profile, source=str(path))


# Synthetic sources

class SourceSpec(BaseModel):
    """A synthetic source; stochastic kinds need a seed."""
    kind: Literal["periodic", "iid", "zipf", "markov"]
    cycle: Optional[str] = None
    prefix: str = ""
    alphabet: Optional[str] = None
    probabilities: Optional[List[float]] = None
    B: Optional[float] = Field(None, gt=0)
    V: Optional[int] = Field(None, ge=1)
    matrix: Optional[List[List[float]]] = None
    seed: Optional[int] = None


def _split_items(rest: str) -> List[str]:
    """Split on commas outside brackets."""
    items, current, depth = [], [], 0
    for ch in rest:
        if ch == "," and depth == 0:
            items.append("".join(current))
            current = []
            continue
        depth += (ch == "[") - (ch == "]")
        current.append(ch)
    items.append("".join(current))
    return [item for item in items if item]


def parse_source_spec(text: str) -> SourceSpec:
    """Read ``{"kind": ...}`` JSON or the compact ``kind:key=value,...`` form."""
    try:
        if text.lstrip().startswith("{"):
            return SourceSpec.model_validate_json(text)
        kind, _, rest = text.partition(":")
        fields = {"kind": kind}
        for item in _split_items(rest):
            key, sep, value = item.partition("=")
            if not sep:
                raise InvalidSpecError(f"expected key=value, got {item!r}")
            fields[key] = json.loads(value) if key in ("probabilities", "matrix") else value
        return SourceSpec.model_validate(fields)
    except (ValidationError, json.JSONDecodeError) as exc:
        raise InvalidSpecError(f"invalid source spec {text!r}: {exc}") from exc


def _rng(spec: SourceSpec) -> np.random.Generator:
    if spec.seed is None:
        raise InvalidSpecError(f"{spec.kind} source needs a seed")
    return np.random.Generator(np.random.PCG64(spec.seed))


def zipf_word(rank: int) -> str:
    """Letters-only name of the word type at a 1-based rank."""
    letters = []
    while rank > 0:
        rank, digit = divmod(rank - 1, 26)
        letters.append(chr(ord("a") + digit))
    return "".join(reversed(letters))


def generate_tokens(spec: SourceSpec, count: int) -> List[str]:
    """Word tokens drawn from a finite power law over ``spec.V`` types."""
    if spec.kind != "zipf" or spec.B is None or spec.V is None:
        raise InvalidSpecError("zipf source needs B and V")
    rng = _rng(spec)
    ranks = np.arange(1, spec.V + 1, dtype=np.float64)
    weights = ranks ** -spec.B
    draws = rng.choice(spec.V, size=count, p=weights / weights.sum())
    names = [zipf_word(r) for r in range(1, spec.V + 1)]
    return [names[i] for i in draws]


def generate(spec: SourceSpec, length: int) -> str:
    """Deterministic text of ``length`` symbols (tokens for zipf sources)."""
    if length < 0:
        raise InvalidSpecError("length must be non-negative")
    if spec.kind == "periodic":
        if not spec.cycle:
            raise InvalidSpecError("periodic source needs a non-empty cycle")
        laps = max(length - len(spec.prefix), 0) // len(spec.cycle) + 1
        return (spec.prefix + spec.cycle * laps)[:length]

    if spec.kind == "zipf":
        return " ".join(generate_tokens(spec, length))

    alphabet = spec.alphabet or "ab"
    if len(set(alphabet)) != len(alphabet):
        raise InvalidSpecError("alphabet has repeated symbols")
    rng = _rng(spec)

    if spec.kind == "iid":
        p = spec.probabilities
        if p is not None and (len(p) != len(alphabet) or not np.isclose(sum(p), 1.0)):
            raise InvalidSpecError("probabilities must match the alphabet and sum to one")
        draws = rng.choice(len(alphabet), size=length, p=p)
        return "".join(alphabet[i] for i in draws)

    matrix = np.asarray(spec.matrix if spec.matrix is not None else [], dtype=np.float64)
    if matrix.shape != (len(alphabet), len(alphabet)) or not np.allclose(matrix.sum(axis=1), 1.0):
        raise InvalidSpecError("markov source needs a row-stochastic matrix over the alphabet")
    cumulative = np.cumsum(matrix, axis=1)
    uniforms = rng.random(length)
    if not length:
        return ""
    state = int(np.searchsorted(np.cumsum(markov_stationary(matrix)), uniforms[0], side="right"))
    state = min(state, len(alphabet) - 1)
    out = [alphabet[state]]
    for u in uniforms[1:]:
        state = min(int(np.searchsorted(cumulative[state], u, side="right")), len(alphabet) - 1)
        out.append(alphabet[state])
    return "".join(out)
