/**
 * Validity cross-check: primary checker versus the RDKit toolkit.
 *
 * Both checkers see the same strings (pristine, or token-mutated at a
 * seeded rate) and every verdict disagreement is catalogued with our
 * error class. Reports are deterministic given corpus, seed, and
 * toolkit version; shard runs mutate each line exactly as a whole run
 * would, so independently produced shard reports merge cleanly.
 */

import { readFileSync } from "node:fs";
import { mutateCorpus, tokenAlphabet } from "./mutate.js";
import { tokenizeLines, validateLines } from "./primary.js";
import { loadRdkit, toolkitValid } from "./rdkit.js";
import type { Disagreement, DivergenceReport } from "./types.js";

export function readCorpus(path: string): string[] {
  return readFileSync(path, "utf8")
    .split("\n")
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
}

interface Shard {
  index: number;
  count: number;
}

export function parseShard(shard: string): Shard {
  const m = /^(\d+)\/(\d+)$/.exec(shard);
  if (!m) throw new Error(`shard must look like "2/4", got ${shard}`);
  const index = Number(m[1]);
  const count = Number(m[2]);
  if (count < 1 || index < 1 || index > count) {
    throw new Error(`bad shard ${shard}`);
  }
  return { index, count };
}

export interface CompareOptions {
  mutationRate?: number;
  seed?: number;
  /** "i/n" to process only the i-th of n contiguous corpus slices. */
  shard?: string;
}

export async function compareValidity(
  corpusPath: string,
  options: CompareOptions = {},
): Promise<DivergenceReport> {
  const { mutationRate = 0, seed = 0, shard } = options;
  const rdkit = await loadRdkit();
  const lines = readCorpus(corpusPath);

  let base = 0;
  let slice = lines;
  if (shard) {
    const { index, count } = parseShard(shard);
    const per = Math.ceil(lines.length / count);
    base = (index - 1) * per;
    slice = lines.slice(base, base + per);
  }

  let strings: string[];
  if (mutationRate > 0) {
    // alphabet comes from the whole corpus so shards mutate identically
    const allTokens = tokenizeLines(lines);
    const alphabet = tokenAlphabet(allTokens);
    const sliceTokens = allTokens.slice(base, base + slice.length);
    strings = mutateCorpus(sliceTokens, mutationRate, seed, alphabet, base);
  } else {
    strings = slice;
  }

  const ours = validateLines(strings);
  const disagreements: Disagreement[] = [];
  for (const verdict of ours) {
    const toolkit = toolkitValid(rdkit, verdict.smiles);
    if (toolkit !== verdict.valid) {
      disagreements.push({
        smiles: verdict.smiles,
        ours: verdict.valid,
        toolkit,
        ourClass: verdict.valid ? "valid" : (verdict.errorClass ?? "unknown"),
      });
    }
  }

  const byClass: Record<string, number> = {};
  for (const d of disagreements) {
    byClass[d.ourClass] = (byClass[d.ourClass] ?? 0) + 1;
  }

  const total = strings.length;
  return {
    corpus: corpusPath,
    mutationRate,
    seed,
    total,
    agreements: total - disagreements.length,
    disagreements,
    agreementRate: total === 0 ? 1 : (total - disagreements.length) / total,
    disagreementsByClass: byClass,
    toolkitVersion: rdkit.version(),
    ...(shard ? { shard } : {}),
  };
}

/** Combine shard reports produced from the same corpus and settings. */
export function mergeReports(reports: DivergenceReport[]): DivergenceReport {
  if (reports.length === 0) throw new Error("nothing to merge");
  const [first] = reports;
  for (const r of reports.slice(1)) {
    if (r.corpus !== first.corpus) throw new Error("corpus mismatch");
    if (r.mutationRate !== first.mutationRate || r.seed !== first.seed) {
      throw new Error("mutation settings mismatch");
    }
    if (r.toolkitVersion !== first.toolkitVersion) {
      throw new Error("toolkit version mismatch");
    }
  }
  const disagreements = reports.flatMap((r) => r.disagreements);
  const total = reports.reduce((acc, r) => acc + r.total, 0);
  const byClass: Record<string, number> = {};
  for (const d of disagreements) {
    byClass[d.ourClass] = (byClass[d.ourClass] ?? 0) + 1;
  }
  return {
    corpus: first.corpus,
    mutationRate: first.mutationRate,
    seed: first.seed,
    total,
    agreements: total - disagreements.length,
    disagreements,
    agreementRate: total === 0 ? 1 : (total - disagreements.length) / total,
    disagreementsByClass: byClass,
    toolkitVersion: first.toolkitVersion,
  };
}
