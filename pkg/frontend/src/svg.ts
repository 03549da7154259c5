/** Tiny SVG builder: every figure is a plain string, so byte-identical inputs
 * give byte-identical files. Numbers are formatted to 3 decimals. */

export function fmt(x: number): string {
  if (!isFinite(x)) return '0';
  const s = x.toFixed(3);
  return s === '-0.000' ? '0.000' : s;
}

export function tag(
  name: string,
  attrs: Record<string, string | number>,
  body = ''
): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === 'number' ? fmt(v) : v}"`)
    .join(' ');
  return body === '' && name !== 'text'
    ? `<${name} ${parts}/>`
    : `<${name} ${parts}>${body}</${name}>`;
}

export function svgDoc(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif">\n` +
    `<rect x="0" y="0" width="${width}" height="${height}" fill="white"/>\n` +
    body +
    '\n</svg>\n'
  );
}

export interface Scale {
  (x: number): number;
  domain: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number]
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const f = ((x: number) => r0 + ((x - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  return f;
}

/** "Nice" tick positions: 5-ish round values covering the domain. */
export function ticks(domain: [number, number], count = 5): number[] {
  const [lo, hi] = domain;
  if (lo === hi) return [lo];
  const step = Math.pow(10, Math.floor(Math.log10((hi - lo) / count)));
  const err = (hi - lo) / count / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const out: number[] = [];
  for (let t = Math.ceil(lo / s) * s; t <= hi + 1e-9; t += s) {
    out.push(Math.round(t / s) * s);
  }
  return out;
}

export function axes(
  xs: Scale,
  ys: Scale,
  xr: [number, number],
  yr: [number, number],
  xLabel: string,
  yLabel: string
): string {
  const parts: string[] = [];
  const [x0, x1] = xr;
  const [y0, y1] = yr; // y0 = bottom pixel, y1 = top pixel
  parts.push(tag('line', { x1: x0, y1: y0, x2: x1, y2: y0, stroke: 'black' }));
  parts.push(tag('line', { x1: x0, y1: y0, x2: x0, y2: y1, stroke: 'black' }));
  for (const t of ticks(xs.domain)) {
    const px = xs(t);
    parts.push(tag('line', { x1: px, y1: y0, x2: px, y2: y0 + 4, stroke: 'black' }));
    parts.push(
      tag(
        'text',
        { x: px, y: y0 + 16, 'font-size': 10, 'text-anchor': 'middle' },
        trimTick(t)
      )
    );
  }
  for (const t of ticks(ys.domain)) {
    const py = ys(t);
    parts.push(tag('line', { x1: x0 - 4, y1: py, x2: x0, y2: py, stroke: 'black' }));
    parts.push(
      tag(
        'text',
        { x: x0 - 6, y: py + 3, 'font-size': 10, 'text-anchor': 'end' },
        trimTick(t)
      )
    );
  }
  parts.push(
    tag(
      'text',
      {
        x: (x0 + x1) / 2,
        y: y0 + 30,
        'font-size': 11,
        'text-anchor': 'middle',
      },
      xLabel
    )
  );
  parts.push(
    tag(
      'text',
      {
        x: x0 - 34,
        y: (y0 + y1) / 2,
        'font-size': 11,
        'text-anchor': 'middle',
        transform: `rotate(-90 ${fmt(x0 - 34)} ${fmt((y0 + y1) / 2)})`,
      },
      yLabel
    )
  );
  return parts.join('\n');
}

function trimTick(t: number): string {
  const s = Math.abs(t) >= 1000 ? t.toString() : +t.toFixed(4) + '';
  return s;
}

/** White -> dark blue ramp for probabilities in [0, 1]. */
export function probColor(v: number): string {
  const t = Math.max(0, Math.min(1, v));
  const r = Math.round(255 - 225 * t);
  const g = Math.round(255 - 195 * t);
  const b = Math.round(255 - 115 * t);
  return `rgb(${r},${g},${b})`;
}

export const SERIES_COLORS = [
  '#1f77b4',
  '#d62728',
  '#2ca02c',
  '#9467bd',
  '#ff7f0e',
  '#8c564b',
];
