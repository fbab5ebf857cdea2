/**
 * Access to the primary toolkit strictly through its command line.
 *
 * The harness never imports the Python package; it spawns the `molvae`
 * executable (override with MOLVAE_BIN) and parses its documented output:
 * `tokenize` emits space-separated tokens per line, `validate` emits
 * per-line tab-separated verdicts.
 */

import { spawnSync } from "node:child_process";
import type { LineVerdict } from "./types.js";

export class PrimaryCliError extends Error {}

export function primaryBin(): string {
  return process.env.MOLVAE_BIN ?? "molvae";
}

function runPrimary(args: string[], input: string): string {
  const bin = primaryBin();
  const proc = spawnSync(bin, args, {
    input,
    encoding: "utf8",
    maxBuffer: 256 * 1024 * 1024,
  });
  if (proc.error) {
    throw new PrimaryCliError(
      `could not run ${bin} ${args.join(" ")}: ${proc.error.message}. ` +
        `Install the primary package (pip install -e ..) or set MOLVAE_BIN.`,
    );
  }
  if (proc.status !== 0) {
    throw new PrimaryCliError(
      `${bin} ${args.join(" ")} exited ${proc.status}: ${proc.stderr.trim()}`,
    );
  }
  return proc.stdout;
}

/** Tokenize one SMILES per input line; token lists come back in order. */
export function tokenizeLines(lines: string[]): string[][] {
  if (lines.length === 0) return [];
  const out = runPrimary(["tokenize"], lines.join("\n") + "\n");
  const rows = out.split("\n").filter((r) => r.length > 0);
  if (rows.length !== lines.length) {
    throw new PrimaryCliError(
      `tokenize returned ${rows.length} rows for ${lines.length} inputs`,
    );
  }
  return rows.map((r) => r.split(" "));
}

/** Validate one SMILES per input line with the primary checker. */
export function validateLines(lines: string[]): LineVerdict[] {
  if (lines.length === 0) return [];
  const out = runPrimary(["validate"], lines.join("\n") + "\n");
  const rows = out.split("\n").filter((r) => r.length > 0);
  if (rows.length !== lines.length) {
    throw new PrimaryCliError(
      `validate returned ${rows.length} rows for ${lines.length} inputs`,
    );
  }
  return rows.map((row, i) => {
    const parts = row.split("\t");
    if (parts[0] === "VALID") {
      return { smiles: lines[i], valid: true };
    }
    if (parts[0] === "INVALID") {
      return {
        smiles: lines[i],
        valid: false,
        errorClass: parts[2] ?? "unknown",
        detail: parts[3] ?? "",
      };
    }
    throw new PrimaryCliError(`unrecognized validate row: ${row}`);
  });
}
