/** The five report charts, built from parsed report tables. */

import { numeric, requireColumns, Table } from "./csv";
import { barChart, BarGroup, lineChart, LineSeries } from "./svg";

export const BENCH_COLUMNS = [
  "scheme", "operation", "iterations", "mean_ns", "p50_ns", "p95_ns",
  "pk_bytes", "sk_bytes", "ct_or_sig_bytes",
];
export const SWEEP_COLUMNS = ["profile", "sessions", "mean_us", "p50_us", "p95_us", "wire_bytes"];
export const SECURITY_COLUMNS = ["scheme", "classical_bits", "quantum_bits"];
export const WORK_COLUMNS = ["scheme", "operation", "hash_calls"];

function unique(values: string[]): string[] {
  return [...new Set(values)];
}

export function timesChart(bench: Table, file: string): string {
  requireColumns(bench, BENCH_COLUMNS, file);
  const operations = unique(bench.rows.map((r) => r.operation));
  const schemes = unique(bench.rows.map((r) => r.scheme));
  const groups: BarGroup[] = schemes.map((scheme) => ({
    label: scheme,
    values: operations.map((op) => {
      const row = bench.rows.find((r) => r.scheme === scheme && r.operation === op);
      return row ? numeric(row, "mean_ns") : 0;
    }),
  }));
  return barChart({
    title: "Execution time by scheme and operation",
    yLabel: "mean_ns",
    series: operations,
    groups,
    logScale: true,
  });
}

export function sizesChart(bench: Table, file: string): string {
  requireColumns(bench, BENCH_COLUMNS, file);
  const sizeColumns = ["pk_bytes", "sk_bytes", "ct_or_sig_bytes"];
  const schemes = unique(bench.rows.map((r) => r.scheme));
  const groups: BarGroup[] = schemes.map((scheme) => {
    const row = bench.rows.find((r) => r.scheme === scheme)!;
    return { label: scheme, values: sizeColumns.map((c) => numeric(row, c)) };
  });
  return barChart({
    title: "Key and payload sizes by scheme",
    yLabel: "bytes",
    series: sizeColumns,
    groups,
    logScale: true,
  });
}

export function workChart(work: Table, file: string): string {
  requireColumns(work, WORK_COLUMNS, file);
  const groups: BarGroup[] = work.rows.map((row) => ({
    label: `${row.scheme} ${row.operation}`,
    values: [numeric(row, "hash_calls")],
  }));
  return barChart({
    title: "Hash invocations per operation",
    yLabel: "hash_calls",
    series: ["hash_calls"],
    groups,
    logScale: true,
  });
}

export function scalabilityChart(sweep: Table, file: string): string {
  requireColumns(sweep, SWEEP_COLUMNS, file);
  const profiles = unique(sweep.rows.map((r) => r.profile));
  const series: LineSeries[] = profiles.map((profile) => ({
    label: profile,
    points: sweep.rows
      .filter((r) => r.profile === profile)
      .map((r) => ({ x: numeric(r, "sessions"), y: numeric(r, "mean_us") }))
      .sort((a, b) => a.x - b.x),
  }));
  return lineChart({
    title: "Mean handshake completion vs concurrent sessions",
    xLabel: "sessions",
    yLabel: "mean_us",
    series,
  });
}

export function securityChart(security: Table, file: string): string {
  requireColumns(security, SECURITY_COLUMNS, file);
  const groups: BarGroup[] = security.rows.map((row) => ({
    label: row.scheme,
    values: [numeric(row, "classical_bits"), numeric(row, "quantum_bits")],
  }));
  return barChart({
    title: "Effective security bits, classical vs quantum adversary",
    yLabel: "bits",
    series: ["classical_bits", "quantum_bits"],
    groups,
  });
}
