/**
 * Seeded single-token corruptions for probing near-valid strings.
 *
 * Each token position independently mutates with probability `rate`;
 * a mutation is an equally likely substitution, deletion, or insertion
 * drawn from the corpus's own token alphabet, so corrupted strings stay
 * lexically plausible rather than trivially garbage.
 *
 * Every line gets its own generator derived from (seed, global line
 * index), so a corpus shard mutates exactly as it would in a whole run.
 */

import { choice, makeRng, type Rng } from "./rng.js";

export function tokenAlphabet(tokenLists: string[][]): string[] {
  const seen = new Set<string>();
  for (const tokens of tokenLists) {
    for (const t of tokens) seen.add(t);
  }
  return [...seen].sort();
}

export function lineRng(seed: number, lineIndex: number): Rng {
  // golden-ratio stride keeps per-line streams well separated
  return makeRng((seed + Math.imul(lineIndex + 1, 0x9e3779b9)) >>> 0);
}

export function mutateTokens(
  tokens: readonly string[],
  rate: number,
  rng: Rng,
  alphabet: readonly string[],
): string[] {
  const out: string[] = [];
  for (const token of tokens) {
    if (rng() >= rate) {
      out.push(token);
      continue;
    }
    const op = choice(rng, ["substitute", "delete", "insert"] as const);
    if (op === "substitute") {
      out.push(choice(rng, alphabet));
    } else if (op === "insert") {
      out.push(choice(rng, alphabet), token);
    }
    // delete: drop the token
  }
  // never emit an empty string; the comparison is about near-valid SMILES
  if (out.length === 0) out.push(choice(rng, alphabet));
  return out;
}

export function mutateCorpus(
  tokenLists: string[][],
  rate: number,
  seed: number,
  alphabet: readonly string[],
  baseIndex = 0,
): string[] {
  return tokenLists.map((tokens, i) =>
    mutateTokens(tokens, rate, lineRng(seed, baseIndex + i), alphabet).join(""),
  );
}
