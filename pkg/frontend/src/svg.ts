/**
 * Hand-rolled SVG renderer for the two-panel fidelity figures.
 *
 * No timestamps or random ids are embedded, so re-rendering the same
 * bundle produces byte-identical output.
 */

import { Curve, label, realizations } from "./csv.js";
import { Panel } from "./figure.js";

export interface RenderOptions {
  width?: number;
  height?: number;
  logX?: boolean;
  logY?: boolean;
  title?: string;
}

const PALETTE = [
  "#4477aa", "#ee6677", "#228833", "#ccbb44",
  "#66ccee", "#aa3377", "#bbbbbb",
];

const M = { top: 34, right: 16, bottom: 42, left: 52 };

interface Scale {
  (v: number): number;
}

function makeScale(domain: [number, number], range: [number, number], log: boolean): Scale {
  const [d0, d1] = log ? [Math.log10(domain[0]), Math.log10(domain[1])] : domain;
  const span = d1 - d0 || 1;
  return (v) => {
    const x = log ? Math.log10(v) : v;
    return range[0] + ((x - d0) / span) * (range[1] - range[0]);
  };
}

function ticks(lo: number, hi: number, n: number, log: boolean): number[] {
  if (log) {
    const out: number[] = [];
    for (let e = Math.ceil(Math.log10(lo)); Math.pow(10, e) <= hi * 1.0001; e++) {
      out.push(Math.pow(10, e));
    }
    return out.length ? out : [lo, hi];
  }
  const step = niceStep((hi - lo) / Math.max(n, 1));
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(raw || 1)));
  const r = raw / mag;
  return (r >= 5 ? 10 : r >= 2 ? 5 : r >= 1 ? 2 : 1) * mag;
}

function fmt(v: number): string {
  if (v !== 0 && (Math.abs(v) < 1e-3 || Math.abs(v) >= 1e4)) return v.toExponential(0);
  return Number(v.toPrecision(6)).toString();
}

function pathFrom(points: Array<[number, number]>): string {
  return points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`)
    .join("");
}

function renderPanel(panel: Panel, x0: number, w: number, h: number,
                     opts: RenderOptions): string {
  const curves = panel.curves;
  const inner = {
    x: x0 + M.left, y: M.top,
    w: w - M.left - M.right, h: h - M.top - M.bottom,
  };
  const allT = curves.flatMap((c) => c.t).filter((t) => !opts.logX || t > 0);
  const allF = curves.flatMap((c) => c.mean).filter((f) => !opts.logY || f > 0);
  const tLo = Math.min(...allT);
  const tHi = Math.max(...allT);
  const fLo = opts.logY ? Math.min(...allF) : 0;
  const fHi = opts.logY ? Math.max(...allF) : 1;
  const sx = makeScale([tLo, tHi], [inner.x, inner.x + inner.w], !!opts.logX);
  const sy = makeScale([fLo, fHi], [inner.y + inner.h, inner.y], !!opts.logY);

  const parts: string[] = [];
  parts.push(`<rect x="${inner.x}" y="${inner.y}" width="${inner.w}" height="${inner.h}" fill="none" stroke="#333" stroke-width="1"/>`);
  for (const tv of ticks(tLo, tHi, 6, !!opts.logX)) {
    const px = sx(tv);
    parts.push(`<line x1="${px.toFixed(2)}" y1="${inner.y + inner.h}" x2="${px.toFixed(2)}" y2="${inner.y + inner.h + 5}" stroke="#333"/>`);
    parts.push(`<text x="${px.toFixed(2)}" y="${inner.y + inner.h + 18}" text-anchor="middle" class="tick">${fmt(tv)}</text>`);
  }
  for (const fv of ticks(fLo, fHi, 5, !!opts.logY)) {
    const py = sy(fv);
    parts.push(`<line x1="${inner.x - 5}" y1="${py.toFixed(2)}" x2="${inner.x}" y2="${py.toFixed(2)}" stroke="#333"/>`);
    parts.push(`<text x="${inner.x - 8}" y="${(py + 3.5).toFixed(2)}" text-anchor="end" class="tick">${fmt(fv)}</text>`);
  }
  parts.push(`<text x="${inner.x + inner.w / 2}" y="${h - 8}" text-anchor="middle" class="axis">t (1/J)</text>`);
  parts.push(`<text transform="translate(${x0 + 14},${inner.y + inner.h / 2}) rotate(-90)" text-anchor="middle" class="axis">fidelity</text>`);
  parts.push(`<text x="${inner.x + inner.w / 2}" y="${M.top - 12}" text-anchor="middle" class="title">${panel.title}</text>`);

  curves.forEach((c, i) => {
    const color = PALETTE[i % PALETTE.length];
    const keep = (t: number, f: number) =>
      (!opts.logX || t > 0) && (!opts.logY || f > 0);
    if (realizations(c) > 1) {
      const up: Array<[number, number]> = [];
      const dn: Array<[number, number]> = [];
      c.t.forEach((t, k) => {
        if (!keep(t, c.mean[k])) return;
        up.push([sx(t), sy(clamp(c.mean[k] + c.stderr[k], fLo, fHi))]);
        dn.push([sx(t), sy(clamp(c.mean[k] - c.stderr[k], fLo, fHi))]);
      });
      const band = pathFrom(up) + pathFrom(dn.reverse()).replace(/^M/, "L") + "Z";
      parts.push(`<path class="band" d="${band}" fill="${color}" fill-opacity="0.25" stroke="none"/>`);
    }
    const pts: Array<[number, number]> = [];
    c.t.forEach((t, k) => {
      if (keep(t, c.mean[k])) pts.push([sx(t), sy(c.mean[k])]);
    });
    parts.push(`<path class="curve" d="${pathFrom(pts)}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    const ly = inner.y + 14 + i * 15;
    parts.push(`<line x1="${inner.x + inner.w - 86}" y1="${ly}" x2="${inner.x + inner.w - 66}" y2="${ly}" stroke="${color}" stroke-width="2"/>`);
    parts.push(`<text x="${inner.x + inner.w - 62}" y="${ly + 3.5}" class="legend">${label(c, curves)}</text>`);
  });
  return parts.join("\n");
}

function clamp(v: number, lo: number, hi: number): number {
  return Math.max(lo === 0 ? -Infinity : lo, Math.min(hi === 1 ? Infinity : hi, v));
}

export function renderFigure(panels: [Panel, Panel], opts: RenderOptions = {}): string {
  const width = opts.width ?? 900;
  const height = opts.height ?? 380;
  const half = width / 2;
  const body = [
    renderPanel(panels[0], 0, half, height, opts),
    renderPanel(panels[1], half, half, height, opts),
  ].join("\n");
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">
<style>
  text { font-family: Helvetica, Arial, sans-serif; fill: #222; }
  .tick { font-size: 10px; }
  .axis { font-size: 12px; }
  .title { font-size: 13px; }
  .legend { font-size: 10px; }
</style>
<rect width="${width}" height="${height}" fill="#ffffff"/>
${body}
</svg>
`;
}
