/** Command-line entry points for the oracle harness. */

import { readFileSync, writeFileSync } from "node:fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { compareValidity, mergeReports } from "./compare.js";
import { emitProperties } from "./properties.js";
import type { DivergenceReport } from "./types.js";

function writeReport(report: DivergenceReport, out?: string): void {
  const text = JSON.stringify(report, null, 2) + "\n";
  if (out) {
    writeFileSync(out, text);
  } else {
    process.stdout.write(text);
  }
  const pct = (report.agreementRate * 100).toFixed(2);
  console.error(
    `${report.agreements}/${report.total} agree (${pct}%), ` +
      `${report.disagreements.length} disagreements`,
  );
}

await yargs(hideBin(process.argv))
  .scriptName("oracle-harness")
  .command(
    "compare <corpus>",
    "cross-check validity verdicts against the toolkit",
    (y) =>
      y
        .positional("corpus", { type: "string", demandOption: true })
        .option("mutation-rate", { type: "number", default: 0 })
        .option("seed", { type: "number", default: 0 })
        .option("shard", { type: "string", describe: 'e.g. "2/4"' })
        .option("out", { type: "string", describe: "report JSON path" }),
    async (argv) => {
      const report = await compareValidity(argv.corpus, {
        mutationRate: argv.mutationRate,
        seed: argv.seed,
        shard: argv.shard,
      });
      writeReport(report, argv.out);
    },
  )
  .command(
    "merge <reports..>",
    "merge shard reports into one",
    (y) =>
      y
        .positional("reports", { type: "string", array: true, demandOption: true })
        .option("out", { type: "string" }),
    (argv) => {
      const parts = (argv.reports as string[]).map(
        (p) => JSON.parse(readFileSync(p, "utf8")) as DivergenceReport,
      );
      writeReport(mergeReports(parts), argv.out);
    },
  )
  .command(
    "properties <corpus>",
    "write smiles,logP,SA rows for the optimizer",
    (y) =>
      y
        .positional("corpus", { type: "string", demandOption: true })
        .option("out", { type: "string", demandOption: true }),
    async (argv) => {
      const result = await emitProperties(argv.corpus, argv.out);
      console.error(
        `wrote ${result.written} rows to ${argv.out}, skipped ${result.skipped}`,
      );
    },
  )
  .demandCommand(1)
  .strict()
  .fail((msg, err) => {
    console.error(err ? err.message : msg);
    process.exit(err ? 1 : 2);
  })
  .parseAsync();
