import { existsSync, mkdirSync, readFileSync, writeFileSync } from 'fs';
import { join } from 'path';

import { readEdges, readMatrix, readTable } from './csv.js';
import {
  diagnostics,
  errorVsN,
  hmmSummary,
  mcpHeatmap,
  treeOverlay,
} from './figures.js';

export interface RenderResult {
  written: string[];
  errors: string[];
}

/** Render every report figure the run directory supports.
 *
 * Read-only over the run directory; all statistics are taken from the CSVs
 * as-is. Missing or unreadable inputs are collected per file; the caller
 * decides the exit code.
 */
export function renderRun(runDir: string, outDir: string): RenderResult {
  const written: string[] = [];
  const errors: string[] = [];
  const manifestPath = join(runDir, 'manifest.json');
  if (!existsSync(manifestPath)) {
    return { written, errors: [`missing: ${manifestPath}`] };
  }
  let manifest: any;
  try {
    manifest = JSON.parse(readFileSync(manifestPath, 'utf8'));
  } catch (e) {
    return { written, errors: [`unreadable manifest: ${manifestPath} (${e})`] };
  }
  const files: string[] = manifest.files ?? [];
  for (const f of files) {
    if (!existsSync(join(runDir, f))) errors.push(`missing: ${join(runDir, f)}`);
  }
  mkdirSync(outDir, { recursive: true });

  const have = (f: string) =>
    files.includes(f) && existsSync(join(runDir, f));
  const emit = (name: string, svg: string) => {
    writeFileSync(join(outDir, name), svg);
    written.push(name);
    console.log(`wrote ${join(outDir, name)}`);
  };

  const command = manifest.spec?.command ?? null;

  try {
    if (have('benchmark_summary.csv')) {
      const rows = readTable(join(runDir, 'benchmark_summary.csv')).map((r) => ({
        method: r.method,
        n: Number(r.n),
        mean_error: Number(r.mean_error),
        ci_lo: Number(r.ci_lo),
        ci_hi: Number(r.ci_hi),
      }));
      const kind = manifest.spec?.kind ?? 'benchmark';
      emit('error_vs_n.svg', errorVsN(rows, `recovery error vs n (${kind})`));
    }

    if (have('mcp.csv') && have('points.csv')) {
      // manifold simulate run: overlay + heatmap + traces
      const pts = readMatrix(join(runDir, 'points.csv'));
      const freq = readMatrix(join(runDir, 'mcp.csv'));
      const tree = have('tree_draw_1.csv')
        ? readEdges(join(runDir, 'tree_draw_1.csv'))
        : null;
      const kind = manifest.spec?.kind ?? 'points';
      emit('tree_overlay.svg', treeOverlay(pts, freq, tree, `posterior trees (${kind})`));
      emit('mcp_heatmap.svg', mcpHeatmap(freq, `edge frequencies (${kind})`));
    } else if (have('mcp.csv')) {
      const mat = readMatrix(join(runDir, 'mcp.csv'));
      emit('mcp_heatmap.svg', mcpHeatmap(mat, `marginal connecting probabilities (${command ?? 'run'})`));
    }

    if (have('mcp_freq.csv')) {
      const mat = readMatrix(join(runDir, 'mcp_freq.csv'));
      emit('mcp_freq_heatmap.svg', mcpHeatmap(mat, 'posterior edge frequencies'));
    }

    if (have('tau_trace.csv')) {
      const tau = readMatrix(join(runDir, 'tau_trace.csv'));
      const deg = have('degree_trace.csv')
        ? readMatrix(join(runDir, 'degree_trace.csv'))
        : null;
      emit('diagnostics.svg', diagnostics(tau, deg, 'sampler diagnostics'));
    }

    if (have('assignments.csv')) {
      const assignments = readTable(join(runDir, 'assignments.csv')).map((r) => ({
        subject: r.subject,
        condition: r.condition,
        t: Number(r.t),
        state: Number(r.state),
      }));
      const classification = have('classification.csv')
        ? readTable(join(runDir, 'classification.csv')).map((r) => ({
            series: r.series,
            true_condition: r.true_condition,
            pr_first: Number(r.pr_first),
          }))
        : null;
      emit(
        'hmm_states.svg',
        hmmSummary(assignments, classification, 'hidden-state assignments')
      );
      // per-state mcp heatmaps
      for (let k = 0; have(`state_${k}_mcp.csv`); k++) {
        const mat = readMatrix(join(runDir, `state_${k}_mcp.csv`));
        emit(`state_${k}_mcp.svg`, mcpHeatmap(mat, `state ${k} edge frequencies`));
      }
    }
  } catch (e) {
    errors.push(`render failure in ${runDir}: ${e}`);
  }

  if (written.length === 0 && errors.length === 0) {
    errors.push(`no renderable artifacts in ${runDir}`);
  }
  return { written, errors };
}
