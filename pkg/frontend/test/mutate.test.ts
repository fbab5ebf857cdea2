import { describe, expect, it } from "vitest";
import { lineRng, mutateCorpus, mutateTokens, tokenAlphabet } from "../src/mutate.js";
import { makeRng } from "../src/rng.js";

const ALPHA = ["C", "N", "O", "(", ")", "1", "="];

describe("tokenAlphabet", () => {
  it("collects unique tokens sorted", () => {
    expect(tokenAlphabet([["C", "C", "("], ["N", "C"]])).toEqual(["(", "C", "N"]);
  });
});

describe("mutateTokens", () => {
  it("rate 0 copies the input", () => {
    const tokens = ["C", "N", "O"];
    expect(mutateTokens(tokens, 0, makeRng(1), ALPHA)).toEqual(tokens);
  });

  it("rate 1 changes every position", () => {
    const tokens = Array(50).fill("C");
    const out = mutateTokens(tokens, 1, makeRng(1), ALPHA);
    // each position was substituted, deleted, or gained an insertion;
    // the result cannot equal the input except with vanishing probability
    expect(out).not.toEqual(tokens);
  });

  it("never returns an empty string", () => {
    for (let seed = 0; seed < 50; seed++) {
      const out = mutateTokens(["C"], 1, makeRng(seed), ALPHA);
      expect(out.length).toBeGreaterThan(0);
    }
  });

  it("only emits alphabet tokens or originals", () => {
    const tokens = ["C", "N", "1", "1"];
    const out = mutateTokens(tokens, 0.5, makeRng(3), ALPHA);
    const allowed = new Set([...ALPHA, ...tokens]);
    for (const t of out) expect(allowed.has(t)).toBe(true);
  });
});

describe("mutateCorpus determinism", () => {
  const corpus = [
    ["C", "C", "O"],
    ["c", "1", "c", "c", "c", "c", "c", "1"],
    ["N", "(", "C", ")", "C"],
  ];

  it("same seed gives identical output", () => {
    const a = mutateCorpus(corpus, 0.3, 7, ALPHA);
    const b = mutateCorpus(corpus, 0.3, 7, ALPHA);
    expect(a).toEqual(b);
  });

  it("different seeds diverge", () => {
    const a = mutateCorpus(corpus, 1, 7, ALPHA);
    const b = mutateCorpus(corpus, 1, 8, ALPHA);
    expect(a).not.toEqual(b);
  });

  it("a shard mutates lines exactly as the whole run does", () => {
    const whole = mutateCorpus(corpus, 0.5, 11, ALPHA, 0);
    const shard = mutateCorpus(corpus.slice(1), 0.5, 11, ALPHA, 1);
    expect(shard).toEqual(whole.slice(1));
  });

  it("per-line streams are independent of neighboring lines", () => {
    const withNeighbor = mutateCorpus(corpus, 0.5, 11, ALPHA, 0)[2];
    const alone = mutateCorpus([corpus[2]], 0.5, 11, ALPHA, 2)[0];
    expect(alone).toEqual(withNeighbor);
  });
});

describe("lineRng", () => {
  it("distinct lines get distinct streams", () => {
    const a = lineRng(5, 0);
    const b = lineRng(5, 1);
    const seqA = [a(), a(), a()];
    const seqB = [b(), b(), b()];
    expect(seqA).not.toEqual(seqB);
  });
});
