/** Minimal CSV reader for the suite's pinned report formats.
 *
 * The report files never quote fields, so a plain comma split is exact.
 */

import { EmptyInput, MissingColumn } from "./errors";

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string, file: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new EmptyInput(file);
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line) => {
    const cells = line.split(",");
    const row: Record<string, string> = {};
    columns.forEach((name, i) => {
      row[name] = cells[i] ?? "";
    });
    return row;
  });
  return { columns, rows };
}

export function requireColumns(table: Table, needed: string[], file: string): void {
  for (const column of needed) {
    if (!table.columns.includes(column)) {
      throw new MissingColumn(file, column);
    }
  }
  if (table.rows.length === 0) {
    throw new EmptyInput(file);
  }
}

export function numeric(row: Record<string, string>, column: string): number {
  const value = Number(row[column]);
  if (!Number.isFinite(value)) {
    throw new Error(`non-numeric value "${row[column]}" in column ${column}`);
  }
  return value;
}
