import { readFileSync } from "node:fs";
import Papa from "papaparse";

/** A parsed CSV: header plus rows keyed by column name (all strings). */
export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export class SchemaError extends Error {}

export function readCsv(path: string): Table {
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`${path}: malformed CSV (${first.message})`);
  }
  const columns = parsed.meta.fields ?? [];
  return { columns, rows: parsed.data };
}

/** Throw unless every named column is present (fail loudly, never guess). */
export function requireColumns(table: Table, names: string[], path: string): void {
  const missing = names.filter((n) => !table.columns.includes(n));
  if (missing.length > 0) {
    throw new SchemaError(
      `${path}: missing required column(s): ${missing.join(", ")} ` +
        `(found: ${table.columns.join(", ") || "none"})`
    );
  }
}

export function numericColumn(table: Table, name: string): number[] {
  return table.rows.map((row, i) => {
    const v = Number(row[name]);
    if (!Number.isFinite(v)) {
      throw new SchemaError(`row ${i + 1}: column ${name} is not numeric: ${row[name]}`);
    }
    return v;
  });
}

export function stringColumn(table: Table, name: string): string[] {
  return table.rows.map((row) => row[name]);
}
