/** Shared shapes for the oracle harness. */

/** One checker's verdict on one string. */
export interface LineVerdict {
  smiles: string;
  valid: boolean;
  /** Error class reported by the primary checker (absent when valid). */
  errorClass?: string;
  detail?: string;
}

/** A string the two checkers disagree on. */
export interface Disagreement {
  smiles: string;
  ours: boolean;
  toolkit: boolean;
  /** Our error class when we reject; "valid" when we accept. */
  ourClass: string;
}

export interface DivergenceReport {
  corpus: string;
  mutationRate: number;
  seed: number;
  total: number;
  agreements: number;
  disagreements: Disagreement[];
  agreementRate: number;
  /** Disagreement counts keyed by our error class. */
  disagreementsByClass: Record<string, number>;
  toolkitVersion: string;
  shard?: string;
}

export interface PropertyRow {
  smiles: string;
  logP: number;
  SA: number;
}

export interface PropertiesResult {
  written: number;
  skipped: number;
  rows: PropertyRow[];
}
