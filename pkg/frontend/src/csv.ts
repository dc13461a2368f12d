/**
 * Reader for the simulator's CSV files.
 *
 * Layout: an optional leading `# key=value ...` metadata comment, a
 * column-header line, then numeric rows. Schema validation reports
 * every missing column by name so a corrupted file fails loudly.
 */

import { readFileSync } from "fs";

export interface ParsedCsv {
  meta: Record<string, string>;
  columns: string[];
  rows: number[][]; // numeric view (NaN for textual cells)
  rawRows: string[][];
  path: string;
}

export class SchemaError extends Error {}

export function parseCsv(text: string, path = "<memory>"): ParsedCsv {
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
  const meta: Record<string, string> = {};
  let start = 0;
  if (lines.length > 0 && lines[0].startsWith("#")) {
    for (const pair of lines[0].slice(1).trim().split(/\s+/)) {
      const eq = pair.indexOf("=");
      if (eq > 0) meta[pair.slice(0, eq)] = pair.slice(eq + 1);
    }
    start = 1;
  }
  if (lines.length <= start) {
    throw new SchemaError(`${path}: no header line`);
  }
  const columns = lines[start].split(",").map((c) => c.trim());
  const rows: number[][] = [];
  const rawRows: string[][] = [];
  for (let i = start + 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new SchemaError(
        `${path}: row ${i + 1} has ${parts.length} fields, expected ${columns.length}`
      );
    }
    rawRows.push(parts);
    rows.push(parts.map((p) => Number(p)));
  }
  return { meta, columns, rows, rawRows, path };
}

export function readCsv(path: string): ParsedCsv {
  return parseCsv(readFileSync(path, "utf-8"), path);
}

/** Throw a SchemaError naming every documented column that is absent. */
export function requireColumns(csv: ParsedCsv, expected: string[]): void {
  const missing = expected.filter((c) => !csv.columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${csv.path}: missing column(s) ${missing.join(", ")}; ` +
        `expected columns: ${expected.join(", ")}`
    );
  }
}

export function column(csv: ParsedCsv, name: string): number[] {
  const idx = csv.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`${csv.path}: missing column(s) ${name}`);
  }
  return csv.rows.map((r) => r[idx]);
}
