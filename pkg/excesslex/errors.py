"""Exception hierarchy shared by the library and the command line."""

from typing import Optional


class ExcessLexError(ValueError):
    """Base class for all errors raised on bad input."""


class CycleDetectedError(ExcessLexError):
    """A nonterminal reaches itself through its productions."""


class BudgetExceededError(ExcessLexError):
    """Input is longer than the exhaustive search budget."""


class MalformedCodeError(ExcessLexError):
    """A binary grammar code violates the container format."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


class GrammarFormatError(ExcessLexError):
    """A textual grammar could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class TextTooShortError(ExcessLexError):
    """The text is too short for the requested window or block length."""


class InsufficientDataError(ExcessLexError):
    """Too few reliable rows, word types or rules for a fit."""


class LengthMismatchError(ExcessLexError):
    """Two segmentations refer to texts of different lengths."""


class InvalidEncodingError(ExcessLexError):
    """Input bytes are not valid UTF-8."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


class EmptyInputError(ExcessLexError):
    """The input contains no symbols after normalization."""


class InvalidSpecError(ExcessLexError):
    """A synthetic source specification is malformed."""


class UnsupportedSourceError(ExcessLexError):
    """No analytic block entropy is available for the source."""
