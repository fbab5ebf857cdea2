"""Token vocabulary with reserved special ids.

Ids 0-3 are pinned: padding, start-of-sequence, end-of-sequence, and
unknown. Corpus tokens follow in sorted order so a vocabulary is a pure
function of the token set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .smiles import tokenize

PAD_ID = 0
SOS_ID = 1
EOS_ID = 2
UNK_ID = 3

PAD_TOKEN = "<pad>"
SOS_TOKEN = "<sos>"
EOS_TOKEN = "<eos>"
UNK_TOKEN = "<unk>"

SPECIALS = (PAD_TOKEN, SOS_TOKEN, EOS_TOKEN, UNK_TOKEN)


class Vocabulary:
    """Bidirectional token/id mapping over SMILES tokens plus specials."""

    def __init__(self, tokens: Iterable[str]):
        ordinary = sorted(set(tokens) - set(SPECIALS))
        self._tokens = list(SPECIALS) + ordinary
        self._index = {t: i for i, t in enumerate(self._tokens)}

    @classmethod
    def from_smiles(cls, smiles: Iterable[str]) -> "Vocabulary":
        tokens: set[str] = set()
        for s in smiles:
            tokens.update(tokenize(s))
        return cls(tokens)

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self._tokens)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self._tokens == other._tokens

    def id(self, token: str) -> int:
        return self._index.get(token, UNK_ID)

    def token(self, token_id: int) -> str:
        return self._tokens[token_id]

    def encode(self, tokens: Iterable[str]) -> list[int]:
        """Map tokens to ids, framed by start and end markers."""
        return [SOS_ID] + [self.id(t) for t in tokens] + [EOS_ID]

    def encode_smiles(self, smiles: str) -> list[int]:
        return self.encode(tokenize(smiles))

    def decode(self, ids: Iterable[int]) -> str:
        """Ids back to a string: stop at the end marker, skip other specials."""
        parts = []
        for i in ids:
            if i == EOS_ID:
                break
            if i in (PAD_ID, SOS_ID, UNK_ID):
                continue
            parts.append(self._tokens[i])
        return "".join(parts)

    def to_list(self) -> list[str]:
        return list(self._tokens)

    @classmethod
    def from_list(cls, tokens: list[str]) -> "Vocabulary":
        if tokens[:4] != list(SPECIALS):
            raise ValueError("token list does not start with the reserved specials")
        vocab = cls(tokens[4:])
        if vocab._tokens != tokens:
            raise ValueError("token list is not in canonical sorted order")
        return vocab


@dataclass(frozen=True)
class TokenSequence:
    """One encoded molecule: ids begin with SOS and end with EOS."""

    ids: tuple[int, ...]

    def __post_init__(self):
        assert self.ids[0] == SOS_ID and self.ids[-1] == EOS_ID

    def __len__(self) -> int:
        return len(self.ids)

    @classmethod
    def from_smiles(cls, vocab: Vocabulary, smiles: str) -> "TokenSequence":
        return cls(tuple(vocab.encode_smiles(smiles)))
