#!/usr/bin/env node
import { renderRun } from './render.js';

function arg(name: string): string | null {
  const argv = process.argv.slice(2);
  const i = argv.indexOf(name);
  return i >= 0 && i + 1 < argv.length ? argv[i + 1] : null;
}

const runDir = arg('--run-dir');
const outDir = arg('--out-dir');
if (!runDir || !outDir) {
  console.error('usage: report-plots --run-dir <dir> --out-dir <dir>');
  process.exit(2);
}

const { written, errors } = renderRun(runDir, outDir);
if (errors.length > 0) {
  console.error(`${errors.length} error(s):`);
  for (const e of errors) console.error(`  ${e}`);
  process.exit(1);
}
console.log(`rendered ${written.length} figure(s)`);
