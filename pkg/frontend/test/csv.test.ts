import { mkdtempSync, writeFileSync } from 'fs';
import { tmpdir } from 'os';
import { join } from 'path';
import { describe, expect, it } from 'vitest';

import { readCsv, readEdges, readMatrix, readTable } from '../src/csv.js';

function tmpFile(content: string): string {
  const dir = mkdtempSync(join(tmpdir(), 'csv-'));
  const path = join(dir, 'f.csv');
  writeFileSync(path, content);
  return path;
}

describe('csv', () => {
  it('splits rows and cells', () => {
    expect(readCsv(tmpFile('a,b\n1,2\n'))).toEqual([
      ['a', 'b'],
      ['1', '2'],
    ]);
  });

  it('reads a headerless numeric matrix', () => {
    expect(readMatrix(tmpFile('1,2\n3.5,-4\n'))).toEqual([
      [1, 2],
      [3.5, -4],
    ]);
  });

  it('reads a header table into records', () => {
    const rows = readTable(tmpFile('x,y\n1,a\n2,b\n'));
    expect(rows).toEqual([
      { x: '1', y: 'a' },
      { x: '2', y: 'b' },
    ]);
  });

  it('converts 1-based edge lists to 0-based pairs', () => {
    expect(readEdges(tmpFile('j,k\n1,2\n2,5\n'))).toEqual([
      [0, 1],
      [1, 4],
    ]);
  });

  it('returns [] for an empty file', () => {
    expect(readCsv(tmpFile(''))).toEqual([]);
  });
});
