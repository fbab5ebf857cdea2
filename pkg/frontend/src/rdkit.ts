/**
 * RDKit WASM loader and thin verdict/descriptor helpers.
 *
 * The toolkit ships as a CommonJS module bundling a WASM binary; it is
 * loaded once per process and reused. `get_mol` with default (full)
 * sanitization is the validity oracle: a null or throwing parse is
 * "invalid".
 */

import { createRequire } from "node:module";

const require = createRequire(import.meta.url);

export class MissingToolkitError extends Error {}

// The subset of the JSMol/RDKitModule API the harness touches.
export interface RdkitMol {
  delete(): void;
  get_descriptors(): string;
}

export interface RdkitModule {
  version(): string;
  get_mol(smiles: string): RdkitMol | null;
}

const loaded = new Map<string, Promise<RdkitModule>>();

export function loadRdkit(moduleId = "@rdkit/rdkit"): Promise<RdkitModule> {
  let pending = loaded.get(moduleId);
  if (!pending) {
    pending = (async () => {
      let init: () => Promise<RdkitModule>;
      try {
        init = require(moduleId);
      } catch (err) {
        throw new MissingToolkitError(
          `RDKit WASM toolkit not found (${(err as Error).message}). ` +
            `Run \`npm install\` in frontend/ to install @rdkit/rdkit.`,
        );
      }
      return init();
    })();
    loaded.set(moduleId, pending);
    // a failed load should not poison later attempts
    pending.catch(() => loaded.delete(moduleId));
  }
  return pending;
}

/** True when the toolkit parses and sanitizes the string. */
export function toolkitValid(rdkit: RdkitModule, smiles: string): boolean {
  try {
    const mol = rdkit.get_mol(smiles);
    if (mol === null) return false;
    mol.delete();
    return true;
  } catch {
    return false;
  }
}

/** Parsed descriptor map, or null when the string does not parse. */
export function toolkitDescriptors(
  rdkit: RdkitModule,
  smiles: string,
): Record<string, number> | null {
  let mol: RdkitMol | null = null;
  try {
    mol = rdkit.get_mol(smiles);
    if (mol === null) return null;
    return JSON.parse(mol.get_descriptors());
  } catch {
    return null;
  } finally {
    if (mol) mol.delete();
  }
}
