/**
 * Reader for the simulator's CSV artifacts.
 *
 * Every file starts with a `# key=value,key=value,...` metadata comment
 * recording the fully resolved parameter set, followed by a header row
 * and numeric data rows. Values that contain per-target lists are
 * semicolon-joined.
 */
import { readFileSync } from "node:fs";

export interface CsvTable {
  /** Resolved parameters from the leading `#` comment line. */
  meta: Record<string, string>;
  /** Column names in file order. */
  columns: string[];
  /** One entry per column name; all the same length. */
  data: Record<string, (number | string)[]>;
  /** Number of data rows. */
  rows: number;
}

export class CsvSchemaError extends Error {}

function parseMeta(line: string): Record<string, string> {
  const meta: Record<string, string> = {};
  for (const pair of line.replace(/^#\s*/, "").split(",")) {
    const eq = pair.indexOf("=");
    if (eq > 0) meta[pair.slice(0, eq).trim()] = pair.slice(eq + 1).trim();
  }
  return meta;
}

export function parseCsv(text: string, source = "<string>"): CsvTable {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  let meta: Record<string, string> = {};
  let i = 0;
  if (lines[0]?.startsWith("#")) {
    meta = parseMeta(lines[0]);
    i = 1;
  }
  if (i >= lines.length) {
    throw new CsvSchemaError(`${source}: no header row`);
  }
  const columns = lines[i].split(",").map((c) => c.trim());
  if (columns.some((c) => c === "")) {
    throw new CsvSchemaError(`${source}: empty column name in header`);
  }
  const data: Record<string, (number | string)[]> = {};
  for (const c of columns) data[c] = [];
  let rows = 0;
  for (i += 1; i < lines.length; i += 1) {
    const cells = lines[i].split(",");
    if (cells.length !== columns.length) {
      throw new CsvSchemaError(
        `${source}: row ${rows + 1} has ${cells.length} cells, ` +
          `expected ${columns.length}`,
      );
    }
    for (let j = 0; j < columns.length; j += 1) {
      const raw = cells[j].trim();
      const num = Number(raw);
      data[columns[j]].push(raw !== "" && Number.isFinite(num) ? num : raw);
    }
    rows += 1;
  }
  if (rows === 0) {
    throw new CsvSchemaError(`${source}: no data rows`);
  }
  return { meta, columns, data, rows };
}

export function readCsv(path: string): CsvTable {
  return parseCsv(readFileSync(path, "utf-8"), path);
}

/** Numeric column accessor; throws CsvSchemaError when absent. */
export function column(table: CsvTable, name: string): number[] {
  if (!(name in table.data)) {
    throw new CsvSchemaError(`missing column '${name}'`);
  }
  return table.data[name].map((v, i) => {
    if (typeof v !== "number") {
      throw new CsvSchemaError(`column '${name}' row ${i} is not numeric`);
    }
    return v;
  });
}

/** String column accessor; throws CsvSchemaError when absent. */
export function textColumn(table: CsvTable, name: string): string[] {
  if (!(name in table.data)) {
    throw new CsvSchemaError(`missing column '${name}'`);
  }
  return table.data[name].map(String);
}
