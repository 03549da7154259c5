import { mkdtempSync, readFileSync } from 'fs';
import { tmpdir } from 'os';
import { join } from 'path';
import { fileURLToPath } from 'url';
import { describe, expect, it } from 'vitest';

import { renderRun } from '../src/render.js';

const FIXTURES = fileURLToPath(new URL('./fixtures', import.meta.url));
const GOLDEN = fileURLToPath(new URL('./golden', import.meta.url));

// Fixed-seed runs committed under fixtures/ must regenerate the committed
// figures byte-for-byte. Regenerate the golden files deliberately (see
// README) when a figure style changes.
const CASES: [string, string[]][] = [
  ['bench_run', ['error_vs_n.svg']],
  ['mcp_run', ['mcp_heatmap.svg']],
  ['fit_run', ['diagnostics.svg', 'mcp_freq_heatmap.svg']],
];

describe('golden figures', () => {
  for (const [run, figures] of CASES) {
    it(`matches committed output for ${run}`, () => {
      const out = mkdtempSync(join(tmpdir(), 'golden-'));
      const { errors } = renderRun(join(FIXTURES, run), out);
      expect(errors).toEqual([]);
      for (const fig of figures) {
        const got = readFileSync(join(out, fig), 'utf8');
        const want = readFileSync(join(GOLDEN, run, fig), 'utf8');
        expect(got).toBe(want);
      }
    });
  }
});
