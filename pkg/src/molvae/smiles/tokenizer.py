"""SMILES tokenization.

A SMILES string is split into lexical units (atoms, bonds, ring-closure
digits, branch parentheses, ...) with a single regular expression. Bracket
atoms such as ``[O-]`` or ``[nH]`` are one token each, as are the two-letter
halogens ``Cl`` and ``Br``.
"""

from __future__ import annotations

import re

# One alternative per lexical unit. Kept bit-exact: the vocabulary of every
# trained checkpoint depends on this pattern.
TOKEN_PATTERN = (
    r"(\[[^\]]+]|Br?|Cl?|N|O|S|P|F|I|b|c|n|o|s|p|\(|\)|\.|=|#|-|\+|\\|\/"
    r"|:|~|@|\?|>|\*|\$|%[0-9]{2}|[0-9])"
)

_TOKEN_RE = re.compile(TOKEN_PATTERN)


class LexicalError(ValueError):
    """A character span that matches no token alternative."""

    def __init__(self, smiles: str, position: int):
        self.smiles = smiles
        self.position = position
        super().__init__(
            f"no SMILES token matches {smiles[position:position + 1]!r} "
            f"at position {position} in {smiles!r}"
        )


def tokenize(smiles: str) -> list[str]:
    """Split a SMILES string into tokens.

    The concatenation of the returned tokens reproduces the input exactly.

    Raises:
        LexicalError: if any character cannot start a token.
    """
    tokens: list[str] = []
    pos = 0
    n = len(smiles)
    while pos < n:
        match = _TOKEN_RE.match(smiles, pos)
        if match is None:
            raise LexicalError(smiles, pos)
        tokens.append(match.group(0))
        pos = match.end()
    return tokens


def detokenize(tokens: list[str]) -> str:
    """Concatenate tokens back into a SMILES string."""
    return "".join(tokens)
