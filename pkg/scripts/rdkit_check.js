// Batch-validate SMILES with the RDKit WASM build (full-sanitization parse).
// Reads one SMILES per line on stdin, prints JSONL [smiles, ok] per line.
// Requires @rdkit/rdkit on the module path, e.g.:
//   NODE_PATH=frontend/node_modules node scripts/rdkit_check.js < data/sample_10k.smi
const initRDKitModule = require('@rdkit/rdkit');

async function main() {
  const RDKit = await initRDKitModule();
  const chunks = [];
  for await (const chunk of process.stdin) chunks.push(chunk);
  const lines = chunks.join('').split('\n');
  let bad = 0;
  let n = 0;
  for (const line of lines) {
    const s = line.trim();
    if (!s) continue;
    n += 1;
    let ok = false;
    try {
      const m = RDKit.get_mol(s);
      ok = m !== null;
      if (m) m.delete();
    } catch (e) {
      ok = false;
    }
    if (!ok) {
      bad += 1;
      console.log(JSON.stringify([s, ok]));
    }
  }
  console.error(`${n - bad}/${n} valid`);
  process.exit(bad === 0 ? 0 : 1);
}

main();
