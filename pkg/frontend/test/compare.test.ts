import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { compareValidity, mergeReports, parseShard, readCorpus } from "../src/compare.js";
import type { DivergenceReport } from "../src/types.js";

function corpusFile(lines: string[]): string {
  const dir = mkdtempSync(join(tmpdir(), "harness-"));
  const path = join(dir, "corpus.smi");
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}

function checkInvariants(report: DivergenceReport): void {
  expect(report.agreements + report.disagreements.length).toBe(report.total);
  const classTotal = Object.values(report.disagreementsByClass).reduce(
    (a, b) => a + b,
    0,
  );
  expect(classTotal).toBe(report.disagreements.length);
  expect(report.toolkitVersion).toMatch(/\d/);
}

describe("readCorpus", () => {
  it("drops blank lines and whitespace", () => {
    const path = corpusFile(["CCO", "", "  CC  ", ""]);
    expect(readCorpus(path)).toEqual(["CCO", "CC"]);
  });
});

describe("parseShard", () => {
  it("accepts i/n", () => {
    expect(parseShard("2/4")).toEqual({ index: 2, count: 4 });
  });

  it("rejects malformed or out-of-range specs", () => {
    expect(() => parseShard("0/4")).toThrow();
    expect(() => parseShard("5/4")).toThrow();
    expect(() => parseShard("x")).toThrow();
  });
});

describe("compareValidity", () => {
  it("agrees on simple fixtures, both ways", async () => {
    // "C(C" and "c1cccc1" must be invalid for both checkers
    const path = corpusFile(["CCO", "c1ccccc1", "C(C", "c1cccc1"]);
    const report = await compareValidity(path);
    checkInvariants(report);
    expect(report.total).toBe(4);
    expect(report.disagreements).toEqual([]);
    expect(report.agreementRate).toBe(1);
  });

  it("is deterministic for a fixed seed and rate", async () => {
    const path = corpusFile(["CCO", "c1ccccc1", "CC(=O)NC", "C1CCCCC1"]);
    const a = await compareValidity(path, { mutationRate: 0.2, seed: 3 });
    const b = await compareValidity(path, { mutationRate: 0.2, seed: 3 });
    expect(a).toEqual(b);
  });

  it("shard reports merge into the whole-run report", async () => {
    const lines = ["CCO", "c1ccccc1", "CC(=O)NC", "C1CCCCC1", "CCN", "CCCC"];
    const path = corpusFile(lines);
    const whole = await compareValidity(path, { mutationRate: 0.4, seed: 9 });
    const parts = await Promise.all([
      compareValidity(path, { mutationRate: 0.4, seed: 9, shard: "1/2" }),
      compareValidity(path, { mutationRate: 0.4, seed: 9, shard: "2/2" }),
    ]);
    expect(parts[0].shard).toBe("1/2");
    const merged = mergeReports(parts);
    expect(merged.total).toBe(whole.total);
    expect(merged.disagreements).toEqual(whole.disagreements);
    checkInvariants(merged);
  });

  it("refuses to merge mismatched settings", async () => {
    const path = corpusFile(["CCO", "CCN"]);
    const a = await compareValidity(path, { mutationRate: 0.2, seed: 1 });
    const b = await compareValidity(path, { mutationRate: 0.2, seed: 2 });
    expect(() => mergeReports([a, b])).toThrow(/mismatch/);
  });

  it("handles an empty corpus", async () => {
    const path = corpusFile([]);
    const report = await compareValidity(path);
    expect(report.total).toBe(0);
    expect(report.agreementRate).toBe(1);
  });
});
