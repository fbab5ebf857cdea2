"""Corpus loading and batching for sequence training.

A corpus file holds one SMILES string per line. Loading tokenizes each
line, drops lines that fail tokenization or exceed the token budget
(counted before the SOS/EOS framing), and reports what was dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .smiles import LexicalError, tokenize
from .vocab import PAD_ID, TokenSequence, Vocabulary


@dataclass(frozen=True)
class CorpusStats:
    n_lines: int
    n_kept: int
    n_dropped_overlong: int
    n_dropped_lexical: int


@dataclass(frozen=True)
class Corpus:
    sequences: list[TokenSequence]
    smiles: list[str]
    vocab: Vocabulary
    stats: CorpusStats
    max_tokens: int


def load_corpus(path: str | Path, max_tokens: int,
                vocab: Vocabulary | None = None) -> Corpus:
    """Read a SMILES file into encoded sequences.

    Builds the vocabulary from the kept lines when none is supplied;
    with a supplied vocabulary, out-of-vocabulary tokens map to UNK.
    """
    lines = Path(path).read_text().splitlines()
    token_lists: list[list[str]] = []
    kept_smiles: list[str] = []
    n_lexical = 0
    n_overlong = 0
    for line in lines:
        s = line.strip()
        if not s:
            continue
        try:
            tokens = tokenize(s)
        except LexicalError:
            n_lexical += 1
            continue
        if len(tokens) > max_tokens:
            n_overlong += 1
            continue
        token_lists.append(tokens)
        kept_smiles.append(s)

    if vocab is None:
        all_tokens: set[str] = set()
        for tokens in token_lists:
            all_tokens.update(tokens)
        vocab = Vocabulary(all_tokens)

    sequences = [TokenSequence(tuple(vocab.encode(t))) for t in token_lists]
    stats = CorpusStats(
        n_lines=len(lines),
        n_kept=len(sequences),
        n_dropped_overlong=n_overlong,
        n_dropped_lexical=n_lexical,
    )
    return Corpus(sequences=sequences, smiles=kept_smiles, vocab=vocab,
                  stats=stats, max_tokens=max_tokens)


def pad_batch(sequences: Sequence[TokenSequence]) -> np.ndarray:
    """Stack sequences into an int32 (B, T) array padded with PAD."""
    width = max(len(s) for s in sequences)
    out = np.full((len(sequences), width), PAD_ID, dtype=np.int32)
    for row, seq in enumerate(sequences):
        out[row, :len(seq)] = seq.ids
    return out


def iterate_batches(sequences: Sequence[TokenSequence], batch_size: int,
                    rng: np.random.Generator | None = None) -> Iterator[np.ndarray]:
    """Yield padded batches; order is shuffled when an rng is given."""
    order = np.arange(len(sequences))
    if rng is not None:
        rng.shuffle(order)
    for start in range(0, len(order), batch_size):
        chosen = order[start:start + batch_size]
        yield pad_batch([sequences[i] for i in chosen])
