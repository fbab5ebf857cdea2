"""Bayesian optimization over a continuous code space.

The loop is generic: it sees the space only through a scoring callback,
so the same machinery drives synthetic benchmarks and molecule search
(decode a latent, score the molecule). Proposals maximize expected
improvement inside a box spanned by the seed points; batches beyond the
first point are chosen greedily with the pending points fantasized at
their posterior mean.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .gp import GpModel, expected_improvement, gp_build, gp_fit, gp_predict
from .smiles import count_large_rings, parse

ScoreFn = Callable[[np.ndarray], "float | None"]


class NoValidCandidates(RuntimeError):
    """Every proposal in an iteration failed to score."""


class MalformedPropertyTable(ValueError):
    """Property CSV is missing the required header or fields."""


@dataclass(frozen=True)
class PropertyRecord:
    """One scored molecule under the penalized water-octanol objective."""

    smiles: str
    logp: float
    sa: float
    cycle_count: int
    y: float

    @classmethod
    def from_properties(cls, smiles: str, logp: float, sa: float
                        ) -> "PropertyRecord":
        cycles = count_large_rings(parse(smiles))
        return cls(smiles=smiles, logp=logp, sa=sa, cycle_count=cycles,
                   y=logp - sa - cycles)


@dataclass
class BoResult:
    best_x: np.ndarray
    best_y: float
    incumbents: list[float]             # best-so-far after each iteration
    evaluated_x: np.ndarray
    evaluated_y: np.ndarray
    n_scored: int
    n_failed: int
    records: list = field(default_factory=list)


def load_property_csv(path: str | Path) -> dict[str, tuple[float, float]]:
    """Read a smiles,logP,SA table into a lookup dict."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedPropertyTable(f"{path}: empty file") from None
        if [h.strip() for h in header] != ["smiles", "logP", "SA"]:
            raise MalformedPropertyTable(
                f"{path}: header must be smiles,logP,SA, got {header!r}")
        table: dict[str, tuple[float, float]] = {}
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise MalformedPropertyTable(f"{path}: bad row {row!r}")
            try:
                table[row[0].strip()] = (float(row[1]), float(row[2]))
            except ValueError as exc:
                raise MalformedPropertyTable(f"{path}: bad row {row!r}") from exc
    return table


def _seed_box(x0: np.ndarray, margin: float = 0.25
              ) -> tuple[np.ndarray, np.ndarray]:
    """Search box: seed bounding box plus a small fraction of the spread.

    The box is kept close to the seeds on purpose. For latent-space
    molecule search the decoder only produces sensible output near the
    region the encoder actually populates; a generous margin sends EI
    chasing posterior variance into territory that decodes to garbage.
    """
    std = x0.std(axis=0)
    std[std == 0.0] = 1.0
    return x0.min(axis=0) - margin * std, x0.max(axis=0) + margin * std


def _argmax_ei(model: GpModel, best: float, lo: np.ndarray, hi: np.ndarray,
               rng: np.random.Generator, n_samples: int = 1024,
               n_polish: int = 3) -> np.ndarray:
    """Sample-then-polish maximization of expected improvement."""
    dim = lo.shape[0]
    cand = rng.uniform(lo, hi, size=(n_samples, dim))
    ei = expected_improvement(*gp_predict(model, cand), best)
    order = np.argsort(ei)[::-1]

    def neg_ei(x: np.ndarray) -> float:
        mean, var = gp_predict(model, x[None, :])
        return -float(expected_improvement(mean, var, best)[0])

    best_x = cand[order[0]]
    best_val = -neg_ei(best_x)
    for idx in order[:n_polish]:
        res = optimize.minimize(neg_ei, cand[idx], method="L-BFGS-B",
                                bounds=list(zip(lo, hi)))
        if -res.fun > best_val:
            best_val = -res.fun
            best_x = res.x
    return best_x


def propose_batch(model: GpModel, best: float, lo: np.ndarray, hi: np.ndarray,
                  k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy EI batch; pending points are believed at their posterior mean."""
    xs: list[np.ndarray] = []
    x_aug, y_aug = model.x, model.y
    for _ in range(k):
        x_next = _argmax_ei(model, best, lo, hi, rng)
        xs.append(x_next)
        if len(xs) == k:
            break
        mean, _ = gp_predict(model, x_next[None, :])
        x_aug = np.vstack([x_aug, x_next[None, :]])
        y_aug = np.append(y_aug, mean[0])
        model = gp_build(x_aug, y_aug, model.params)
        best = max(best, float(mean[0]))
    return np.stack(xs)


def bo_loop(score_fn: ScoreFn, x0: np.ndarray, y0: np.ndarray,
            rng: np.random.Generator, n_iterations: int = 5,
            batch_size: int = 1, refit_every: int = 1) -> BoResult:
    """Run EI-driven optimization starting from scored seed points.

    score_fn returns the objective at a point, or None when the point
    cannot be scored (for molecules: the decode was invalid). Failed
    points are dropped; an iteration whose entire batch fails raises
    NoValidCandidates.
    """
    x_all = np.asarray(x0, dtype=np.float64).copy()
    y_all = np.asarray(y0, dtype=np.float64).copy()
    if x_all.ndim != 2 or y_all.shape != (x_all.shape[0],):
        raise ValueError("x0 must be (N, D) with matching y0 of shape (N,)")
    lo, hi = _seed_box(x_all)

    incumbents: list[float] = []
    n_scored = 0
    n_failed = 0
    model = gp_fit(x_all, y_all, rng)
    for it in range(n_iterations):
        if it > 0:
            if it % refit_every == 0:
                model = gp_fit(x_all, y_all, rng)
            else:
                model = gp_build(x_all, y_all, model.params)
        best = float(y_all.max())
        batch = propose_batch(model, best, lo, hi, batch_size, rng)
        scored_any = False
        for x_next in batch:
            y_next = score_fn(x_next)
            if y_next is None or not math.isfinite(y_next):
                n_failed += 1
                continue
            scored_any = True
            n_scored += 1
            x_all = np.vstack([x_all, x_next[None, :]])
            y_all = np.append(y_all, y_next)
        if not scored_any:
            raise NoValidCandidates(
                f"iteration {it}: no proposal in the batch of "
                f"{batch_size} produced a score")
        incumbents.append(float(y_all.max()))

    best_idx = int(np.argmax(y_all))
    return BoResult(
        best_x=x_all[best_idx].copy(),
        best_y=float(y_all[best_idx]),
        incumbents=incumbents,
        evaluated_x=x_all,
        evaluated_y=y_all,
        n_scored=n_scored,
        n_failed=n_failed,
    )


def optimize_molecules(model_decode: Callable[[np.ndarray], "str | None"],
                       seed_latents: np.ndarray,
                       seed_records: Sequence[PropertyRecord],
                       scorer: Callable[[str], "tuple[float, float] | None"],
                       rng: np.random.Generator,
                       n_iterations: int = 5,
                       batch_size: int = 1) -> BoResult:
    """Molecule search: decode proposals, score them, track records."""
    records: list[PropertyRecord] = list(seed_records)
    x0 = np.asarray(seed_latents, dtype=np.float64)
    y0 = np.array([r.y for r in records], dtype=np.float64)

    def score(x: np.ndarray) -> "float | None":
        smiles = model_decode(x)
        if smiles is None:
            return None
        props = scorer(smiles)
        if props is None:
            return None
        record = PropertyRecord.from_properties(smiles, *props)
        records.append(record)
        return record.y

    result = bo_loop(score, x0, y0, rng, n_iterations=n_iterations,
                     batch_size=batch_size)
    result.records = records
    return result
