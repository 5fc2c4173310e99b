/** Render benchmark report CSVs into SVG chart files.
 *
 * The input path names the bench CSV (pinned 9-column header); the
 * sweep, security, and work CSVs are read from the same directory when
 * their charts are selected.  Inputs are never modified; output names
 * are fixed per chart, so reruns overwrite the same file set.
 */

import * as fs from "fs";
import * as path from "path";

import { parseCsv, requireColumns, Table } from "./csv";
import {
  BENCH_COLUMNS, scalabilityChart, securityChart, sizesChart, timesChart,
  workChart,
} from "./charts";

export const CHART_NAMES = ["times", "sizes", "work", "scalability", "security"] as const;
export type ChartName = (typeof CHART_NAMES)[number];

export interface PlotSpec {
  input: string;      // path to bench.csv
  outDir: string;
  charts?: ChartName[];
}

function loadTable(file: string): Table {
  return parseCsv(fs.readFileSync(file, "utf-8"), path.basename(file));
}

export function render(spec: PlotSpec): string[] {
  const charts = spec.charts ?? [...CHART_NAMES];
  for (const chart of charts) {
    if (!CHART_NAMES.includes(chart)) {
      throw new Error(`unknown chart "${chart}" (expected one of ${CHART_NAMES.join(", ")})`);
    }
  }

  const bench = loadTable(spec.input);
  requireColumns(bench, BENCH_COLUMNS, path.basename(spec.input));
  const dir = path.dirname(spec.input);
  const sibling = (name: string) => path.join(dir, name);

  const builders: Record<ChartName, () => string> = {
    times: () => timesChart(bench, path.basename(spec.input)),
    sizes: () => sizesChart(bench, path.basename(spec.input)),
    work: () => workChart(loadTable(sibling("work.csv")), "work.csv"),
    scalability: () => scalabilityChart(loadTable(sibling("sweep.csv")), "sweep.csv"),
    security: () => securityChart(loadTable(sibling("security.csv")), "security.csv"),
  };

  fs.mkdirSync(spec.outDir, { recursive: true });
  const written: string[] = [];
  for (const chart of charts) {
    const svg = builders[chart]();
    const file = path.join(spec.outDir, `${chart}.svg`);
    fs.writeFileSync(file, svg);
    written.push(file);
  }
  return written;
}
