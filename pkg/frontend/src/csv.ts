import { readFileSync } from 'fs';

/** Split a CSV file into rows of string cells (no quoting in our outputs). */
export function readCsv(path: string): string[][] {
  const txt = readFileSync(path, 'utf8').trim();
  if (txt === '') return [];
  return txt.split(/\r?\n/).map((line) => line.split(','));
}

/** Headerless numeric matrix (mcp.csv, trace CSVs, points.csv, ...). */
export function readMatrix(path: string): number[][] {
  return readCsv(path).map((row) => row.map(Number));
}

/** First row is the header; remaining rows come back as objects. */
export function readTable(path: string): Record<string, string>[] {
  const rows = readCsv(path);
  if (rows.length === 0) return [];
  const header = rows[0];
  return rows.slice(1).map((cells) => {
    const rec: Record<string, string> = {};
    header.forEach((name, i) => (rec[name] = cells[i]));
    return rec;
  });
}

/** Edge list CSV with a "j,k" header and 1-based node labels -> 0-based pairs. */
export function readEdges(path: string): [number, number][] {
  return readTable(path).map((r) => [Number(r.j) - 1, Number(r.k) - 1]);
}
