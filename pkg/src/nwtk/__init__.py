"""Multi-stack nested words: matchings, visibly pushdown automata, sphere
analysis, counting logic, grid encodings, and direction-string walks."""

from .core import (
    CallReturnAlphabet,
    NestedWord,
    nested,
    format_word,
    parse_word_line,
)
from .errors import NwtkError

__version__ = "0.1.0"

__all__ = [
    "CallReturnAlphabet",
    "NestedWord",
    "nested",
    "format_word",
    "parse_word_line",
    "NwtkError",
    "__version__",
]
