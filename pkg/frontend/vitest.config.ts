import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    // the agreement suite runs two 10k-molecule corpora through both
    // checkers; give it room on a single CPU
    testTimeout: 600_000,
    hookTimeout: 120_000,
    pool: "forks",
    poolOptions: {
      forks: { singleFork: true },
    },
  },
});
