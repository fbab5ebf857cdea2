"""Evaluation protocols: reconstruction, prior validity, sampling.

Two fixed protocols with explicit attempt accounting:

* reconstruction: every molecule is encoded ``n_encodings`` times, and
  each latent is decoded ``n_decodings`` times (default 10 x 10);
* prior validity: ``n_latents`` draws from the prior, each decoded
  ``n_decodings`` times (default 1000 x 100).

A decode that runs to the step cap without emitting the end token is a
failed attempt: it never counts as a match or as a valid molecule.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .model import SmilesVae
from .smiles import ValidityVerdict, check_validity
from .vocab import TokenSequence, UNK_ID, Vocabulary

SPECIAL_ID_CEILING = 4      # ids below this are pad/sos/eos/unk


class GenerationTimeout(RuntimeError):
    """Sampling could not produce the requested molecules in time."""


@dataclass(frozen=True)
class ReconReport:
    sequence_accuracy: float
    token_accuracy: float
    valid_but_unmatched_fraction: float
    n_molecules: int
    n_encodings: int
    n_decodings: int
    attempts: int


@dataclass(frozen=True)
class ValidityReport:
    validity: float
    n_valid: int
    unique_valid_count: int
    attempts: int
    n_latents: int
    n_decodings: int
    error_histogram: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class SampleReport:
    smiles: list[str]
    attempts: int
    wall_time: float


def _row_smiles(row: list[int], vocab: Vocabulary) -> str | None:
    """Decode an emitted id row; None when it contains a reserved id."""
    if any(i < SPECIAL_ID_CEILING for i in row):
        return None
    return "".join(vocab.token(i) for i in row)


def _token_accuracy(row: list[int], ref: tuple[int, ...]) -> float:
    width = max(len(row), len(ref))
    if width == 0:
        return 1.0
    hits = sum(1 for a, b in zip(row, ref) if a == b)
    return hits / width


def reconstruction_accuracy(model: SmilesVae, sequences: list[TokenSequence],
                            vocab: Vocabulary, rng: np.random.Generator,
                            n_encodings: int = 10, n_decodings: int = 10,
                            max_len: int | None = None,
                            mol_chunk: int = 50,
                            validity_cache: dict[str, "ValidityVerdict"] | None = None,
                            ) -> ReconReport:
    """Stochastic-reconstruction protocol over encoded molecules."""
    from .data import pad_batch

    if validity_cache is None:
        validity_cache = {}
    if max_len is None:
        max_len = max(len(s) for s in sequences) + 10

    attempts = 0
    exact = 0
    token_acc_sum = 0.0
    unmatched = 0
    unmatched_valid = 0

    for lo in range(0, len(sequences), mol_chunk):
        batch = sequences[lo:lo + mol_chunk]
        ids = pad_batch(batch)
        refs = [tuple(s.ids[1:-1]) for s in batch]
        dist = model.encode(ids)
        for _ in range(n_encodings):
            z = model.reparameterize(dist, rng).data
            z_rep = np.repeat(z, n_decodings, axis=0)
            rows, reached_eos = model.generate(z_rep, max_len, rng)
            for r, row in enumerate(rows):
                ref = refs[r // n_decodings]
                attempts += 1
                ok = bool(reached_eos[r])
                if ok and tuple(row) == ref:
                    exact += 1
                    token_acc_sum += 1.0
                    continue
                token_acc_sum += _token_accuracy(row, ref) if ok else 0.0
                unmatched += 1
                smiles = _row_smiles(row, vocab) if ok else None
                if smiles is not None:
                    if smiles not in validity_cache:
                        validity_cache[smiles] = check_validity(smiles)
                    if validity_cache[smiles].valid:
                        unmatched_valid += 1

    return ReconReport(
        sequence_accuracy=exact / attempts,
        token_accuracy=token_acc_sum / attempts,
        valid_but_unmatched_fraction=(unmatched_valid / unmatched
                                      if unmatched else 0.0),
        n_molecules=len(sequences),
        n_encodings=n_encodings,
        n_decodings=n_decodings,
        attempts=attempts,
    )


def prior_validity(model: SmilesVae, vocab: Vocabulary,
                   rng: np.random.Generator,
                   n_latents: int = 1000, n_decodings: int = 100,
                   max_len: int = 70, chunk_rows: int = 2000,
                   validity_cache: dict[str, "ValidityVerdict"] | None = None,
                   ) -> ValidityReport:
    """Prior-sampling protocol: validity rate of decoded molecules."""
    if validity_cache is None:
        validity_cache = {}

    z = model.sample_prior(n_latents, rng)
    z_rep = np.repeat(z, n_decodings, axis=0)

    attempts = 0
    n_valid = 0
    unique_valid: set[str] = set()
    histogram: Counter[str] = Counter()

    for lo in range(0, z_rep.shape[0], chunk_rows):
        rows, reached_eos = model.generate(z_rep[lo:lo + chunk_rows],
                                           max_len, rng)
        for r, row in enumerate(rows):
            attempts += 1
            if not reached_eos[r]:
                histogram["no_eos"] += 1
                continue
            smiles = _row_smiles(row, vocab)
            if smiles is None:
                histogram["reserved_token"] += 1
                continue
            if smiles not in validity_cache:
                validity_cache[smiles] = check_validity(smiles)
            verdict = validity_cache[smiles]
            if verdict.valid:
                n_valid += 1
                unique_valid.add(smiles)
            else:
                histogram[verdict.error_class.value] += 1

    return ValidityReport(
        validity=n_valid / attempts,
        n_valid=n_valid,
        unique_valid_count=len(unique_valid),
        attempts=attempts,
        n_latents=n_latents,
        n_decodings=n_decodings,
        error_histogram=dict(histogram),
    )


def generate_unique_valid(model: SmilesVae, vocab: Vocabulary, n: int,
                          rng: np.random.Generator, max_len: int = 70,
                          batch: int = 500, timeout_s: float = 600.0,
                          ) -> SampleReport:
    """Draw from the prior until n distinct valid molecules are collected."""
    start = time.monotonic()
    found: list[str] = []
    seen: set[str] = set()
    attempts = 0
    while len(found) < n:
        if time.monotonic() - start > timeout_s:
            raise GenerationTimeout(
                f"collected {len(found)}/{n} molecules in {timeout_s:.0f}s "
                f"({attempts} attempts)")
        z = model.sample_prior(batch, rng)
        rows, reached_eos = model.generate(z, max_len, rng)
        for r, row in enumerate(rows):
            attempts += 1
            if not reached_eos[r]:
                continue
            smiles = _row_smiles(row, vocab)
            if smiles is None or smiles in seen:
                continue
            seen.add(smiles)
            if check_validity(smiles).valid:
                found.append(smiles)
                if len(found) == n:
                    break
    return SampleReport(smiles=found, attempts=attempts,
                        wall_time=time.monotonic() - start)
