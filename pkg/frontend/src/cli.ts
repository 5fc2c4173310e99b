#!/usr/bin/env node
/** Render charts from a pqhybrid benchmark report.
 *
 * Usage:
 *   node dist/cli.js <bench.csv> <output-dir> [chart ...]
 *
 * Charts: times sizes work scalability security (default: all five).
 * sweep.csv, security.csv, and work.csv are read from the directory of
 * the given bench.csv.  Exit codes: 0 success, 1 failure with one
 * `error: <Category>` line on stderr, 2 usage.
 */

import { ChartName, CHART_NAMES, render } from "./render";

function main(argv: string[]): number {
  if (argv.length < 2) {
    process.stderr.write(
      `usage: cli.js <bench.csv> <output-dir> [${CHART_NAMES.join("|")} ...]\n`);
    return 2;
  }
  const [input, outDir, ...charts] = argv;
  try {
    const written = render({
      input,
      outDir,
      charts: charts.length > 0 ? (charts as ChartName[]) : undefined,
    });
    for (const file of written) {
      process.stdout.write(file + "\n");
    }
    return 0;
  } catch (err) {
    const name = err instanceof Error ? err.name : "Error";
    process.stderr.write(`error: ${name}\n`);
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
