"""SMILES tokenization, parsing, and validity checking."""

from .parser import (
    Atom,
    Bond,
    MoleculeGraph,
    ParenthesesError,
    StructureError,
    UnclosedRingError,
    parse,
)
from .rings import count_large_rings, sssr
from .tokenizer import TOKEN_PATTERN, LexicalError, detokenize, tokenize
from .validity import (
    MAX_VALENCE,
    ErrorClass,
    ValidityVerdict,
    check_validity,
    classify_error,
)

__all__ = [
    "Atom",
    "Bond",
    "MoleculeGraph",
    "ParenthesesError",
    "StructureError",
    "UnclosedRingError",
    "LexicalError",
    "ErrorClass",
    "ValidityVerdict",
    "MAX_VALENCE",
    "TOKEN_PATTERN",
    "parse",
    "tokenize",
    "detokenize",
    "sssr",
    "count_large_rings",
    "check_validity",
    "classify_error",
]
