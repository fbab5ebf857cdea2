/** Deterministic PRNG so mutation runs are reproducible from a seed. */

export type Rng = () => number;

/** mulberry32: tiny 32-bit generator, uniform in [0, 1). */
export function makeRng(seed: number): Rng {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Uniform integer in [0, n). */
export function randInt(rng: Rng, n: number): number {
  return Math.floor(rng() * n);
}

export function choice<T>(rng: Rng, items: readonly T[]): T {
  return items[randInt(rng, items.length)];
}
