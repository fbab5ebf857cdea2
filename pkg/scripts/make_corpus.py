"""Synthesize the bundled drug-like SMILES corpus.

Molecules are assembled from curated ring cores, linkers, and terminal
groups with per-position substitution, so emitted strings are valid by
construction. Every candidate is still re-checked with the package's
validity checker; anything that fails is dropped. Output is deterministic
for a fixed seed.

The committed data files were additionally cross-checked against an
established cheminformatics toolkit (see scripts/rdkit_check.js) before
being frozen; re-run that check after regenerating.

Usage:
    python3 scripts/make_corpus.py --out-dir data --seed 20260819
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from molvae.smiles import check_validity, tokenize  # noqa: E402

MAX_TOKENS = 58


class DigitAllocator:
    """Hands out unused ring-closure labels during one rendering."""

    def __init__(self):
        self.next = 1

    def take(self) -> tuple[str, str]:
        d = self.next
        self.next += 1
        if d > 99:
            raise ValueError("ring label overflow")
        label = str(d) if d <= 9 else f"%{d:02d}"
        return label, label


# Ring cores: (atom tokens with 'R' placeholders for closure labels,
# indexes of substitutable positions). Placeholder 'R'/'S' in an atom
# cell marks where the first/second closure label lands.
CORES = [
    # benzene
    (["cR", "c", "c", "c", "c", "cR"], [1, 2, 3, 4], 30),
    # pyridine
    (["cR", "c", "c", "n", "c", "cR"], [1, 2, 4], 10),
    # pyrimidine
    (["cR", "c", "n", "c", "n", "cR"], [1, 3], 4),
    # pyrrole / imidazole / pyrazole / furan / thiophene / oxazole
    (["cR", "c", "c", "c", "[nH]R"], [1, 2, 3], 4),
    (["cR", "c", "n", "c", "[nH]R"], [1, 3], 3),
    (["cR", "c", "c", "n", "[nH]R"], [1, 2], 2),
    (["cR", "c", "c", "c", "oR"], [1, 2, 3], 3),
    (["cR", "c", "c", "c", "sR"], [1, 2, 3], 3),
    (["cR", "n", "c", "c", "oR"], [2, 3], 2),
    # saturated rings
    (["CR", "C", "C", "C", "C", "CR"], [1, 2, 3, 4], 6),
    (["CR", "C", "C", "C", "CR"], [1, 2, 3], 4),
    (["CR", "C", "C", "N", "C", "CR"], [1, 3, 4], 6),
    (["CR", "C", "N", "C", "C", "NR"], [2], 3),
    (["OR", "C", "C", "N", "C", "CR"], [3], 3),
    (["CR", "C", "C", "O", "C", "CR"], [1, 2], 2),
    # fused aromatics: naphthalene, indole, benzimidazole
    (["cR", "c", "c", "cS", "c", "c", "c", "c", "cS", "cR"], [1, 2, 4, 5, 6, 7], 3),
    (["cR", "c", "c", "cS", "[nH]", "c", "c", "cS", "cR"], [1, 2, 6], 2),
    (["cR", "c", "c", "cS", "n", "c", "[nH]", "cS", "cR"], [1, 2], 1),
]

TERMINALS = [
    ("C", 20), ("CC", 10), ("CCC", 4), ("C(C)C", 6), ("C(C)(C)C", 3),
    ("F", 10), ("Cl", 8), ("Br", 3), ("I", 1),
    ("O", 10), ("OC", 8), ("OCC", 3), ("OC(F)F", 1), ("C(F)(F)F", 4),
    ("N", 6), ("NC", 3), ("N(C)C", 4), ("C#N", 4),
    ("C=O", 1), ("C(=O)C", 2), ("C(=O)O", 4), ("C(=O)OC", 3),
    ("C(=O)N", 3), ("C(=O)NC", 2), ("C(=O)N(C)C", 2),
    ("S(=O)(=O)C", 2), ("S(=O)(=O)N", 2), ("SC", 1),
    ("[N+](=O)[O-]", 3), ("C(=O)[O-]", 2), ("[NH3+]", 2), ("[NH+](C)C", 1),
    ("CO", 4), ("CCO", 2), ("C=C", 1), ("CC#N", 1),
    ("[C@H](C)O", 1), ("[C@@H](C)N", 1), ("/C=C/C", 1),
]

# Substituent rings attach through their first atom.
RING_SUBS = [
    ("c{a}ccccc{a}", 8),
    ("c{a}ccc(F)cc{a}", 3),
    ("c{a}ccc(Cl)cc{a}", 3),
    ("c{a}ccc(OC)cc{a}", 3),
    ("c{a}ccc(C)cc{a}", 2),
    ("c{a}ccncc{a}", 3),
    ("c{a}cccnc{a}", 2),
    ("c{a}ccco{a}", 1),
    ("c{a}cccs{a}", 1),
    ("n{a}cccc{a}", 1),
    ("C{a}CC{a}", 2),
    ("C{a}CCCCC{a}", 2),
    ("N{a}CCCCC{a}", 2),
    ("N{a}CCOCC{a}", 3),
    ("N{a}CCN(C)CC{a}", 2),
]

LINKERS = [
    ("", 6), ("C", 8), ("CC", 4), ("O", 4), ("OC", 3), ("N", 2),
    ("NC(=O)", 4), ("C(=O)N", 4), ("C(=O)", 2), ("S(=O)(=O)", 1),
    ("CO", 2), ("N(C)", 1), ("C=C", 1), ("OCC", 1), ("NCC", 1),
]

CHAIN_UNITS = [
    ("C", 10), ("CC", 6), ("C(C)", 4), ("O", 3), ("N", 2),
    ("C(=O)", 3), ("C(=O)N", 3), ("NC(=O)", 3), ("OC", 2), ("C(C)(C)", 2),
]


def weighted(rng: random.Random, table):
    total = sum(w for _, w in table)
    pick = rng.uniform(0, total)
    acc = 0.0
    for item, w in table:
        acc += w
        if pick <= acc:
            return item
    return table[-1][0]


def weighted3(rng: random.Random, table):
    total = sum(w for *_, w in table)
    pick = rng.uniform(0, total)
    acc = 0.0
    for *item, w in table:
        acc += w
        if pick <= acc:
            return item
    return [*table[-1]][:-1]


def render_ring_sub(rng: random.Random, digits: DigitAllocator) -> str:
    template = weighted(rng, RING_SUBS)
    label, _ = digits.take()
    return template.format(a=label)


def substituent(rng: random.Random, digits: DigitAllocator, depth: int) -> str:
    roll = rng.random()
    if depth == 0 and roll < 0.22:
        linker = weighted(rng, LINKERS)
        return linker + render_ring_sub(rng, digits)
    if roll < 0.45:
        linker = weighted(rng, LINKERS)
        if linker:
            return linker + weighted(rng, TERMINALS)
    return weighted(rng, TERMINALS)


def render_core(rng: random.Random, digits: DigitAllocator,
                n_subs: int) -> tuple[str, bool]:
    atoms, positions = weighted3(rng, CORES)
    label1, _ = digits.take()
    label2 = None
    chosen = rng.sample(positions, min(n_subs, len(positions)))
    out = []
    for i, cell in enumerate(atoms):
        text = cell
        if "R" in text:
            text = text.replace("R", label1)
        if "S" in text:
            if label2 is None:
                label2, _ = digits.take()
            text = text.replace("S", label2)
        if i in chosen:
            text += f"({substituent(rng, digits, depth=0)})"
        out.append(text)
    # A chain may continue only from a closing atom that tolerates one
    # more bond (carbon or amine nitrogen, never [nH]/o/s).
    tail_ok = atoms[-1][0] in "cCN"
    return "".join(out), tail_ok


def render_chain(rng: random.Random, digits: DigitAllocator) -> str:
    parts = [weighted(rng, CHAIN_UNITS) for _ in range(rng.randint(2, 5))]
    tail = weighted(rng, TERMINALS)
    if rng.random() < 0.35:
        tail = render_ring_sub(rng, digits)
    return "".join(parts) + tail


def make_molecule(rng: random.Random) -> str:
    digits = DigitAllocator()
    roll = rng.random()
    if roll < 0.12:
        return render_chain(rng, digits)
    n_subs = rng.choices([1, 2, 3], weights=[35, 45, 20])[0]
    core, tail_ok = render_core(rng, digits, n_subs)
    if roll < 0.30 and tail_ok:  # second core joined through a linker
        linker = weighted(rng, LINKERS)
        extra = render_ring_sub(rng, digits)
        return core + linker + extra
    return core


def generate_pool(seed: int, count: int) -> list[str]:
    rng = random.Random(seed)
    seen: set[str] = set()
    pool: list[str] = []
    attempts = 0
    rejected = 0
    while len(pool) < count:
        attempts += 1
        if attempts > count * 50:
            raise RuntimeError("generator is rejecting too many candidates")
        try:
            s = make_molecule(rng)
        except ValueError:
            rejected += 1
            continue
        if s in seen:
            continue
        if len(tokenize(s)) > MAX_TOKENS:
            rejected += 1
            continue
        verdict = check_validity(s)
        if not verdict.valid:
            rejected += 1
            continue
        seen.add(s)
        pool.append(s)
    print(f"generated {len(pool)} unique molecules "
          f"({attempts} attempts, {rejected} rejected)")
    return pool


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, default=Path("data"))
    ap.add_argument("--seed", type=int, default=20260819)
    ap.add_argument("--pool", type=int, default=12500)
    args = ap.parse_args()

    pool = generate_pool(args.seed, args.pool)
    lengths = sorted(len(tokenize(s)) for s in pool)
    mid = lengths[len(lengths) // 2]
    print(f"token lengths: min {lengths[0]} median {mid} max {lengths[-1]}")

    args.out_dir.mkdir(parents=True, exist_ok=True)
    splits = {
        "sample_10k.smi": pool[:10000],
        "train_5k.smi": pool[:5000],
        "valid_1k.smi": pool[10000:11000],
        "test_1k.smi": pool[11000:12000],
        "bo_pool.smi": pool[12000:12500],
    }
    for name, rows in splits.items():
        path = args.out_dir / name
        path.write_text("\n".join(rows) + "\n")
        print(f"wrote {path} ({len(rows)} molecules)")


if __name__ == "__main__":
    main()
