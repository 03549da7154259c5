import {
  axes,
  fmt,
  linearScale,
  probColor,
  SERIES_COLORS,
  svgDoc,
  tag,
} from './svg.js';

export interface SummaryRow {
  method: string;
  n: number;
  mean_error: number;
  ci_lo: number;
  ci_hi: number;
}

/** Mean recovery error vs sample size, one line + interval band per method. */
export function errorVsN(rows: SummaryRow[], title: string): string {
  const width = 520;
  const height = 360;
  const margin = { left: 60, right: 140, top: 40, bottom: 50 };
  const methods = [...new Set(rows.map((r) => r.method))].sort();
  const nValues = [...new Set(rows.map((r) => r.n))].sort((a, b) => a - b);
  const yMax = Math.max(...rows.map((r) => r.ci_hi), 1e-9);
  const xs = linearScale(
    [nValues[0], nValues[nValues.length - 1]],
    [margin.left, width - margin.right]
  );
  const ys = linearScale([0, yMax * 1.05], [height - margin.bottom, margin.top]);

  const parts: string[] = [];
  parts.push(
    tag(
      'text',
      { x: width / 2, y: 20, 'font-size': 13, 'text-anchor': 'middle' },
      title
    )
  );
  methods.forEach((method, mi) => {
    const color = SERIES_COLORS[mi % SERIES_COLORS.length];
    const series = rows
      .filter((r) => r.method === method)
      .sort((a, b) => a.n - b.n);
    const band =
      series.map((r) => `${fmt(xs(r.n))},${fmt(ys(r.ci_hi))}`).join(' ') +
      ' ' +
      series
        .slice()
        .reverse()
        .map((r) => `${fmt(xs(r.n))},${fmt(ys(r.ci_lo))}`)
        .join(' ');
    parts.push(
      tag('polygon', { points: band, fill: color, 'fill-opacity': '0.15', stroke: 'none' })
    );
    const line = series
      .map((r) => `${fmt(xs(r.n))},${fmt(ys(r.mean_error))}`)
      .join(' ');
    parts.push(
      tag('polyline', { points: line, fill: 'none', stroke: color, 'stroke-width': 2 })
    );
    for (const r of series) {
      parts.push(
        tag('circle', { cx: xs(r.n), cy: ys(r.mean_error), r: 3, fill: color })
      );
    }
    const ly = margin.top + 16 * mi;
    parts.push(
      tag('line', {
        x1: width - margin.right + 10,
        y1: ly,
        x2: width - margin.right + 30,
        y2: ly,
        stroke: color,
        'stroke-width': 2,
      })
    );
    parts.push(
      tag(
        'text',
        { x: width - margin.right + 34, y: ly + 4, 'font-size': 10 },
        method
      )
    );
  });
  parts.push(
    axes(
      xs,
      ys,
      [margin.left, width - margin.right],
      [height - margin.bottom, margin.top],
      'sample size n',
      'recovery error'
    )
  );
  return svgDoc(width, height, parts.join('\n'));
}

/** p x p probability matrix as a heatmap with a vertical colorbar. */
export function mcpHeatmap(mat: number[][], title: string): string {
  const p = mat.length;
  const cell = Math.max(2, Math.min(16, Math.floor(420 / p)));
  const left = 50;
  const top = 40;
  const size = cell * p;
  const width = left + size + 80;
  const height = top + size + 30;
  const parts: string[] = [];
  parts.push(
    tag(
      'text',
      { x: left + size / 2, y: 20, 'font-size': 13, 'text-anchor': 'middle' },
      title
    )
  );
  for (let i = 0; i < p; i++) {
    for (let j = 0; j < p; j++) {
      parts.push(
        tag('rect', {
          x: left + j * cell,
          y: top + i * cell,
          width: cell,
          height: cell,
          fill: probColor(mat[i][j]),
        })
      );
    }
  }
  parts.push(
    tag('rect', {
      x: left,
      y: top,
      width: size,
      height: size,
      fill: 'none',
      stroke: 'black',
    })
  );
  // colorbar
  const bx = left + size + 20;
  const steps = 40;
  for (let s = 0; s < steps; s++) {
    const v = 1 - s / (steps - 1);
    parts.push(
      tag('rect', {
        x: bx,
        y: top + (s * size) / steps,
        width: 14,
        height: size / steps + 0.5,
        fill: probColor(v),
      })
    );
  }
  for (const v of [0, 0.5, 1]) {
    parts.push(
      tag(
        'text',
        { x: bx + 18, y: top + (1 - v) * size + 4, 'font-size': 9 },
        v.toString()
      )
    );
  }
  return svgDoc(width, height, parts.join('\n'));
}

/** 2-D points with posterior edge frequencies as line opacity; an optional
 * tree draw is overlaid in red. */
export function treeOverlay(
  points: number[][],
  freq: number[][],
  treeEdges: [number, number][] | null,
  title: string
): string {
  const width = 460;
  const height = 420;
  const margin = 40;
  const xsDom: [number, number] = [
    Math.min(...points.map((q) => q[0])),
    Math.max(...points.map((q) => q[0])),
  ];
  const ysDom: [number, number] = [
    Math.min(...points.map((q) => q[1])),
    Math.max(...points.map((q) => q[1])),
  ];
  const xs = linearScale(xsDom, [margin, width - margin]);
  const ys = linearScale(ysDom, [height - margin, margin + 20]);
  const parts: string[] = [];
  parts.push(
    tag(
      'text',
      { x: width / 2, y: 20, 'font-size': 13, 'text-anchor': 'middle' },
      title
    )
  );
  const p = points.length;
  for (let j = 0; j < p; j++) {
    for (let k = j + 1; k < p; k++) {
      const f = freq[j][k];
      if (f < 0.02) continue;
      parts.push(
        tag('line', {
          x1: xs(points[j][0]),
          y1: ys(points[j][1]),
          x2: xs(points[k][0]),
          y2: ys(points[k][1]),
          stroke: '#1f77b4',
          'stroke-opacity': fmt(f),
          'stroke-width': 1.5,
        })
      );
    }
  }
  if (treeEdges) {
    for (const [j, k] of treeEdges) {
      parts.push(
        tag('line', {
          x1: xs(points[j][0]),
          y1: ys(points[j][1]),
          x2: xs(points[k][0]),
          y2: ys(points[k][1]),
          stroke: '#d62728',
          'stroke-width': 1,
          'stroke-dasharray': '3 2',
        })
      );
    }
  }
  for (const q of points) {
    parts.push(
      tag('circle', { cx: xs(q[0]), cy: ys(q[1]), r: 3.5, fill: 'black' })
    );
  }
  return svgDoc(width, height, parts.join('\n'));
}

/** Two stacked panels: global-scale trace per chain and node-degree traces. */
export function diagnostics(
  tauTrace: number[][],
  degreeTrace: number[][] | null,
  title: string
): string {
  const width = 560;
  const panelH = 180;
  const height = degreeTrace ? 2 * panelH + 40 : panelH + 40;
  const parts: string[] = [];
  parts.push(
    tag(
      'text',
      { x: width / 2, y: 18, 'font-size': 13, 'text-anchor': 'middle' },
      title
    )
  );
  parts.push(tracePanel(tauTrace, 30, panelH, width, 'iteration', 'tau'));
  if (degreeTrace) {
    // show the first few node degrees only; more is unreadable
    const cols = Math.min(5, degreeTrace[0].length);
    const sub = degreeTrace.map((row) => row.slice(0, cols));
    parts.push(
      tracePanel(sub, panelH + 40, panelH, width, 'iteration', 'degree')
    );
  }
  return svgDoc(width, height, parts.join('\n'));
}

function tracePanel(
  trace: number[][],
  top: number,
  panelH: number,
  width: number,
  xLabel: string,
  yLabel: string
): string {
  const margin = { left: 60, right: 20 };
  const nIter = trace.length;
  const nSeries = trace[0].length;
  let lo = Infinity;
  let hi = -Infinity;
  for (const row of trace)
    for (const v of row) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const xs = linearScale([0, nIter - 1], [margin.left, width - margin.right]);
  const ys = linearScale([lo, hi], [top + panelH - 40, top + 10]);
  const parts: string[] = [];
  for (let s = 0; s < nSeries; s++) {
    const pts = trace
      .map((row, i) => `${fmt(xs(i))},${fmt(ys(row[s]))}`)
      .join(' ');
    parts.push(
      tag('polyline', {
        points: pts,
        fill: 'none',
        stroke: SERIES_COLORS[s % SERIES_COLORS.length],
        'stroke-width': 1,
      })
    );
  }
  parts.push(
    axes(
      xs,
      ys,
      [margin.left, width - margin.right],
      [top + panelH - 40, top + 10],
      xLabel,
      yLabel
    )
  );
  return parts.join('\n');
}

export interface AssignmentRow {
  subject: string;
  condition: string;
  t: number;
  state: number;
}

export interface ClassificationRow {
  series: string;
  true_condition: string;
  pr_first: number;
}

/** State-assignment timelines per series plus held-out classification bars. */
export function hmmSummary(
  assignments: AssignmentRow[],
  classification: ClassificationRow[] | null,
  title: string
): string {
  const keys = [...new Set(assignments.map((a) => `${a.subject}|${a.condition}`))];
  const T = Math.max(...assignments.map((a) => a.t)) + 1;
  const rowH = 16;
  const left = 110;
  const top = 40;
  const plotW = 360;
  const clsH = classification ? 26 + classification.length * 16 : 0;
  const width = left + plotW + 30;
  const height = top + keys.length * rowH + 40 + clsH;
  const parts: string[] = [];
  parts.push(
    tag(
      'text',
      { x: width / 2, y: 20, 'font-size': 13, 'text-anchor': 'middle' },
      title
    )
  );
  const byKey = new Map<string, AssignmentRow[]>();
  for (const a of assignments) {
    const key = `${a.subject}|${a.condition}`;
    if (!byKey.has(key)) byKey.set(key, []);
    byKey.get(key)!.push(a);
  }
  keys.forEach((key, row) => {
    const y = top + row * rowH;
    const [subject, condition] = key.split('|');
    parts.push(
      tag(
        'text',
        { x: left - 6, y: y + rowH - 5, 'font-size': 9, 'text-anchor': 'end' },
        `${subject} (${condition})`
      )
    );
    const cw = plotW / T;
    for (const a of byKey.get(key)!) {
      parts.push(
        tag('rect', {
          x: left + a.t * cw,
          y: y + 1,
          width: cw + 0.5,
          height: rowH - 2,
          fill: SERIES_COLORS[a.state % SERIES_COLORS.length],
        })
      );
    }
  });
  let yCls = top + keys.length * rowH + 30;
  if (classification) {
    parts.push(
      tag('text', { x: left, y: yCls, 'font-size': 11 }, 'held-out pr(first condition)')
    );
    yCls += 8;
    classification.forEach((c, i) => {
      const y = yCls + i * 16;
      parts.push(
        tag(
          'text',
          { x: left - 6, y: y + 10, 'font-size': 9, 'text-anchor': 'end' },
          `${c.series} (${c.true_condition})`
        )
      );
      parts.push(
        tag('rect', {
          x: left,
          y: y + 2,
          width: Math.max(1, c.pr_first * plotW),
          height: 10,
          fill: '#1f77b4',
        })
      );
      parts.push(
        tag('rect', {
          x: left,
          y: y + 2,
          width: plotW,
          height: 10,
          fill: 'none',
          stroke: '#888',
        })
      );
    });
  }
  return svgDoc(width, height, parts.join('\n'));
}
