/**
 * Property table export: smiles,logP,SA rows for optimizer seeding.
 *
 * logP is the toolkit's Crippen estimate. The WASM build does not ship
 * a synthetic-accessibility scorer, so SA is a documented surrogate on
 * the same 1 (easy) to 10 (hard) scale, built from the toolkit's own
 * descriptors:
 *
 *   SA = 1 + 0.04*heavyAtoms + 0.25*stereoCenters + 0.5*spiroAtoms
 *          + 0.5*bridgeheadAtoms + 0.2*aliphaticRings, clamped to [1, 10]
 *
 * Size and three-dimensional complexity drive the score up, mirroring
 * the established scorer's complexity penalties; the fragment-frequency
 * term is omitted. Lines the toolkit cannot parse are skipped and
 * counted.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { loadRdkit, toolkitDescriptors } from "./rdkit.js";
import type { PropertiesResult, PropertyRow } from "./types.js";

export function saSurrogate(desc: Record<string, number>): number {
  const raw =
    1 +
    0.04 * (desc.NumHeavyAtoms ?? 0) +
    0.25 * (desc.NumAtomStereoCenters ?? 0) +
    0.5 * (desc.NumSpiroAtoms ?? 0) +
    0.5 * (desc.NumBridgeheadAtoms ?? 0) +
    0.2 * (desc.NumAliphaticRings ?? 0);
  return Math.min(10, Math.max(1, raw));
}

export async function computeProperties(
  lines: string[],
  log: (msg: string) => void = () => {},
): Promise<PropertiesResult> {
  const rdkit = await loadRdkit();
  const rows: PropertyRow[] = [];
  let skipped = 0;
  lines.forEach((smiles, i) => {
    const desc = toolkitDescriptors(rdkit, smiles);
    if (desc === null || typeof desc.CrippenClogP !== "number") {
      skipped += 1;
      log(`line ${i + 1}: unparsable, skipped: ${smiles}`);
      return;
    }
    rows.push({ smiles, logP: desc.CrippenClogP, SA: saSurrogate(desc) });
  });
  return { written: rows.length, skipped, rows };
}

const round4 = (x: number): number => Math.round(x * 1e4) / 1e4;

export function toCsv(rows: PropertyRow[]): string {
  // SMILES never contain commas or quotes, so no field escaping needed
  const body = rows.map((r) => `${r.smiles},${round4(r.logP)},${round4(r.SA)}`);
  return ["smiles,logP,SA", ...body].join("\n") + "\n";
}

export async function emitProperties(
  corpusPath: string,
  outPath: string,
  log: (msg: string) => void = console.error,
): Promise<PropertiesResult> {
  const lines = readFileSync(corpusPath, "utf8")
    .split("\n")
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  const result = await computeProperties(lines, log);
  writeFileSync(outPath, toCsv(result.rows));
  return result;
}
