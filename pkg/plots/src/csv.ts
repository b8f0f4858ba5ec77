import { readFileSync } from "fs";

export interface Table {
  header: string[];
  rows: string[][];
}

export function readCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new Error(`cannot read input file: ${path}`);
  }
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length < 2) {
    throw new Error(`empty input: ${path}`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((l) => l.split(","));
  return { header, rows };
}

export function numericColumn(table: Table, name: string, path: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`missing column '${name}' in ${path}`);
  }
  return table.rows.map((r) => Number(r[idx]));
}
