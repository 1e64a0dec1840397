"""
Uniquely decodable binary code for grammars.

Container layout (all integers Elias gamma coded, so every field is
self-delimiting):

    magic        32 bits, ASCII "GBC1"
    |A|          alphabet size
    cp0 + 1      first code point of the sorted alphabet
    delta_i      differences between consecutive code points (>= 1)
    R            rule count; rules follow in canonical order 0..R-1
    per rule:    production length, then per symbol a flag bit
                 (0 terminal, 1 nonterminal), then the rule id or the
                 alphabet rank + 1 (rule 0 is never referenced)
    padding      zero bits up to the next byte boundary
"""

import logging
import math
from typing import Iterable, List, Optional, Union

from bitarray import bitarray
from bitarray.util import ba2int, int2ba
from pydantic import BaseModel, ConfigDict, Field

from .config import settings
from .errors import CycleDetectedError, ExcessLexError, MalformedCodeError
from .grammar import Grammar, canonicalize, grammar_length, topological_order
from .infer import InferenceConfig, infer
from .metrics import record_code_length, set_gamma_constant

logger = logging.getLogger(__name__)

MAGIC = b"GBC1"
_MAX_GAMMA_ZEROS = 40
_MAX_CODE_POINT = 0x10FFFF


class BinaryCode(BaseModel):
    """Encoded grammar: the bit stream packed into bytes."""
    model_config = ConfigDict(frozen=True)

    payload: bytes = Field(..., description="Bits packed big-endian, zero padded")
    length_bits: int = Field(..., ge=0, description="Number of meaningful bits")

    @property
    def bits(self) -> bitarray:
        stream = bitarray(endian="big")
        stream.frombytes(self.payload)
        return stream[:self.length_bits]

    def to_bytes(self) -> bytes:
        return self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "BinaryCode":
        """Wrap raw container bytes; the meaningful length is found by decoding."""
        return cls(payload=bytes(data), length_bits=len(data) * 8)


class CodeLengthReport(BaseModel):
    """Code length of one text under one inference algorithm."""
    input_length: int
    code_length_bits: int
    grammar_length: int
    bits_per_character: float
    gamma_bound_bits: float = Field(..., description="|G| (c + log2 |G|) with the recorded c")


class BitWriter:
    """Accumulates bits and Elias gamma integers."""

    def __init__(self):
        self.bits = bitarray(endian="big")

    def write_bit(self, bit: int) -> None:
        self.bits.append(bit)

    def write_bytes(self, data: bytes) -> None:
        self.bits.frombytes(data)

    def write_gamma(self, value: int) -> None:
        if value < 1:
            raise ValueError(f"gamma code needs a positive integer, got {value}")
        binary = int2ba(value, endian="big")
        self.bits.extend([0] * (len(binary) - 1))
        self.bits.extend(binary)

    def finish(self) -> BinaryCode:
        length = len(self.bits)
        padded = self.bits.copy()
        padded.fill()
        return BinaryCode(payload=padded.tobytes(), length_bits=length)


class BitReader:
    """Reads back what ``BitWriter`` wrote, reporting byte offsets on failure."""

    def __init__(self, bits: bitarray):
        self.bits = bits
        self.pos = 0

    def fail(self, message: str) -> MalformedCodeError:
        return MalformedCodeError(message, self.pos // 8)

    def read_bit(self) -> int:
        if self.pos >= len(self.bits):
            raise self.fail("unexpected end of code")
        bit = self.bits[self.pos]
        self.pos += 1
        return bit

    def read_bytes(self, count: int) -> bytes:
        end = self.pos + 8 * count
        if end > len(self.bits):
            raise self.fail("unexpected end of code")
        data = self.bits[self.pos:end].tobytes()
        self.pos = end
        return data

    def read_gamma(self) -> int:
        zeros = 0
        while self.read_bit() == 0:
            zeros += 1
            if zeros > _MAX_GAMMA_ZEROS:
                raise self.fail("integer field too long")
        if zeros == 0:
            return 1
        end = self.pos + zeros
        if end > len(self.bits):
            raise self.fail("unexpected end of code")
        value = (1 << zeros) | ba2int(self.bits[self.pos:end])
        self.pos = end
        return value


def encode(grammar: Grammar) -> BinaryCode:
    """Encode the canonical form of an admissible grammar."""
    grammar = canonicalize(grammar)
    alphabet = sorted(grammar.alphabet)
    rank = {ch: i for i, ch in enumerate(alphabet)}

    writer = BitWriter()
    writer.write_bytes(MAGIC)
    writer.write_gamma(len(alphabet))
    previous = None
    for ch in alphabet:
        point = ord(ch)
        writer.write_gamma(point + 1 if previous is None else point - previous)
        previous = point
    writer.write_gamma(grammar.rule_count)
    for rule_id in range(grammar.rule_count):
        production = grammar.rules[rule_id]
        writer.write_gamma(len(production))
        for symbol in production:
            if isinstance(symbol, int):
                writer.write_bit(1)
                writer.write_gamma(symbol)
            else:
                writer.write_bit(0)
                writer.write_gamma(rank[symbol] + 1)
    code = writer.finish()
    record_code_length(code.length_bits)
    return code


def decode(code: Union[BinaryCode, bytes]) -> Grammar:
    """Decode a container; raises MalformedCodeError on the first violation."""
    if isinstance(code, (bytes, bytearray)):
        code = BinaryCode.from_bytes(code)
    reader = BitReader(code.bits)

    if reader.read_bytes(len(MAGIC)) != MAGIC:
        reader.pos = 0
        raise reader.fail("bad magic header")

    alphabet: List[str] = []
    size = reader.read_gamma()
    point = -1
    for i in range(size):
        value = reader.read_gamma()
        point = value - 1 if i == 0 else point + value
        if point > _MAX_CODE_POINT or 0xD800 <= point <= 0xDFFF:
            raise reader.fail(f"invalid code point {point}")
        alphabet.append(chr(point))

    rule_count = reader.read_gamma()
    rules = {}
    for rule_id in range(rule_count):
        length = reader.read_gamma()
        production = []
        for _ in range(length):
            nonterminal = reader.read_bit()
            index = reader.read_gamma()
            if nonterminal:
                if index >= rule_count:
                    raise reader.fail(f"rule {rule_id} references undefined rule {index}")
                production.append(index)
            else:
                index -= 1
                if index >= len(alphabet):
                    raise reader.fail(f"terminal index {index} outside the alphabet")
                production.append(alphabet[index])
        rules[rule_id] = tuple(production)

    remaining = code.bits[reader.pos:]
    if len(remaining) > (-reader.pos) % 8 or remaining.any():
        raise reader.fail("trailing data after the last rule")

    grammar = Grammar.model_construct(rules=rules)
    try:
        topological_order(grammar)
    except CycleDetectedError as exc:
        raise MalformedCodeError(str(exc), reader.pos // 8) from exc
    return grammar


def measure_gamma_constant(grammars: Iterable[Grammar]) -> float:
    """Smallest c with bits <= |G| (c + log2 |G|) over all given grammars."""
    worst = -math.inf
    for grammar in grammars:
        size = grammar_length(grammar)
        bits = encode(grammar).length_bits
        worst = max(worst, bits / size - math.log2(size))
    if worst == -math.inf:
        raise ExcessLexError("no grammars to measure")
    set_gamma_constant(worst)
    logger.info("measured gamma constant c = %.3f", worst)
    return worst


def gamma_bound(size: int, constant: Optional[float] = None) -> float:
    """|G| (c + log2 |G|)."""
    c = settings.codec_gamma_c if constant is None else constant
    return size * (c + math.log2(size))


def code_length(text: str, algorithm: Optional[str] = None) -> int:
    """Bits of the grammar-based code of ``text``."""
    config = InferenceConfig(algorithm=algorithm) if algorithm else InferenceConfig()
    return encode(infer(text, config)).length_bits


def code_length_report(text: str, algorithm: Optional[str] = None) -> CodeLengthReport:
    """Infer, encode and report the lengths of one text."""
    config = InferenceConfig(algorithm=algorithm) if algorithm else InferenceConfig()
    grammar = infer(text, config)
    size = grammar_length(grammar)
    bits = encode(grammar).length_bits
    return CodeLengthReport(
        input_length=len(text),
        code_length_bits=bits,
        grammar_length=size,
        bits_per_character=bits / len(text),
        gamma_bound_bits=gamma_bound(size),
    )


def lz78_code_length(text: str) -> int:
    """Bits of a plain LZ78 code: phrase index plus extension character per phrase."""
    alphabet_bits = math.ceil(math.log2(len(set(text)))) if len(set(text)) > 1 else 0
    dictionary = {}
    current = ""
    phrases = 0
    bits = 0
    for char in text:
        extended = current + char
        if extended in dictionary:
            current = extended
            continue
        phrases += 1
        bits += math.ceil(math.log2(phrases)) + alphabet_bits
        dictionary[extended] = phrases
        current = ""
    if current:
        phrases += 1
        bits += math.ceil(math.log2(phrases))
    return bits
