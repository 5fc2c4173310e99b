/** Hand-rolled SVG chart builders: grouped bars and multi-series lines.
 *
 * Output is deterministic: fixed canvas, fixed palette, no timestamps.
 */

const WIDTH = 920;
const HEIGHT = 480;
const MARGIN = { top: 48, right: 32, bottom: 96, left: 84 };

const PALETTE = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2"];

const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function header(title: string): string[] {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    `<text x="${WIDTH / 2}" y="28" text-anchor="middle" font-size="18">${esc(title)}</text>`,
  ];
}

function legend(labels: string[]): string[] {
  const parts: string[] = [];
  let x = MARGIN.left;
  const y = HEIGHT - 20;
  labels.forEach((label, i) => {
    const color = PALETTE[i % PALETTE.length];
    parts.push(`<rect x="${x}" y="${y - 10}" width="12" height="12" fill="${color}"/>`);
    parts.push(`<text x="${x + 16}" y="${y}" font-size="12">${esc(label)}</text>`);
    x += 16 + 8 * label.length + 24;
  });
  return parts;
}

export interface BarGroup {
  label: string;
  values: number[]; // one per series
}

export interface BarChart {
  title: string;
  yLabel: string;
  series: string[];
  groups: BarGroup[];
  logScale?: boolean;
}

function niceTicksLinear(max: number): number[] {
  if (max <= 0) return [0, 1];
  const raw = max / 4;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const step = Math.ceil(raw / mag) * mag;
  const ticks: number[] = [];
  for (let v = 0; v <= max + step / 2; v += step) ticks.push(v);
  return ticks;
}

function formatTick(value: number): string {
  if (value >= 1e9) return `${value / 1e9}e9`;
  if (value >= 1e6) return `${value / 1e6}e6`;
  if (value >= 1e3) return `${value / 1e3}e3`;
  return `${value}`;
}

export function barChart(spec: BarChart): string {
  const parts = header(spec.title);
  const values = spec.groups.flatMap((g) => g.values);
  const rawMax = Math.max(...values, 1);

  // scale: value -> bar height in [0, PLOT_H]
  let scale: (v: number) => number;
  let ticks: { value: number; label: string }[];
  if (spec.logScale) {
    const logMax = Math.ceil(Math.log10(rawMax));
    scale = (v) => (v <= 0 ? 0 : (Math.log10(v) / logMax) * PLOT_H);
    ticks = [];
    for (let p = 0; p <= logMax; p++) {
      ticks.push({ value: Math.pow(10, p), label: `1e${p}` });
    }
  } else {
    const tickValues = niceTicksLinear(rawMax);
    const top = tickValues[tickValues.length - 1];
    scale = (v) => (v / top) * PLOT_H;
    ticks = tickValues.map((v) => ({ value: v, label: formatTick(v) }));
  }

  // axes
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + PLOT_H;
  parts.push(`<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}" stroke="black"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0 + PLOT_W}" y2="${y0}" stroke="black"/>`);
  for (const tick of ticks) {
    const y = y0 - scale(tick.value);
    parts.push(`<line x1="${x0 - 4}" y1="${y}" x2="${x0}" y2="${y}" stroke="black"/>`);
    parts.push(`<text x="${x0 - 8}" y="${y + 4}" text-anchor="end" font-size="11">${esc(tick.label)}</text>`);
    if (tick.value > 0) {
      parts.push(`<line x1="${x0}" y1="${y}" x2="${x0 + PLOT_W}" y2="${y}" stroke="#dddddd"/>`);
    }
  }
  parts.push(`<text x="20" y="${MARGIN.top + PLOT_H / 2}" font-size="13" transform="rotate(-90 20 ${MARGIN.top + PLOT_H / 2})" text-anchor="middle">${esc(spec.yLabel)}</text>`);

  // bars
  const groupWidth = PLOT_W / spec.groups.length;
  const barWidth = Math.min(36, (groupWidth * 0.8) / spec.series.length);
  spec.groups.forEach((group, gi) => {
    const groupX = x0 + gi * groupWidth + groupWidth / 2;
    const total = barWidth * spec.series.length;
    group.values.forEach((value, si) => {
      const h = scale(value);
      const x = groupX - total / 2 + si * barWidth;
      const color = PALETTE[si % PALETTE.length];
      parts.push(`<rect x="${x.toFixed(2)}" y="${(y0 - h).toFixed(2)}" width="${barWidth.toFixed(2)}" height="${h.toFixed(2)}" fill="${color}"/>`);
    });
    parts.push(`<text x="${groupX}" y="${y0 + 16}" text-anchor="middle" font-size="12">${esc(group.label)}</text>`);
  });

  parts.push(...legend(spec.series));
  parts.push("</svg>");
  return parts.join("\n");
}

export interface LineSeries {
  label: string;
  points: { x: number; y: number }[];
}

export interface LineChart {
  title: string;
  xLabel: string;
  yLabel: string;
  series: LineSeries[];
}

export function lineChart(spec: LineChart): string {
  const parts = header(spec.title);
  const xs = spec.series.flatMap((s) => s.points.map((p) => p.x));
  const ys = spec.series.flatMap((s) => s.points.map((p) => p.y));
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs, xMin + 1);
  const yTicks = niceTicksLinear(Math.max(...ys, 1));
  const yTop = yTicks[yTicks.length - 1];

  const sx = (x: number) => MARGIN.left + ((x - xMin) / (xMax - xMin)) * PLOT_W;
  const sy = (y: number) => MARGIN.top + PLOT_H - (y / yTop) * PLOT_H;

  const x0 = MARGIN.left;
  const y0 = MARGIN.top + PLOT_H;
  parts.push(`<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}" stroke="black"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0 + PLOT_W}" y2="${y0}" stroke="black"/>`);
  for (const tick of yTicks) {
    const y = sy(tick);
    parts.push(`<line x1="${x0 - 4}" y1="${y}" x2="${x0}" y2="${y}" stroke="black"/>`);
    parts.push(`<text x="${x0 - 8}" y="${y + 4}" text-anchor="end" font-size="11">${esc(formatTick(tick))}</text>`);
  }
  const xTicks = [...new Set(xs)].sort((a, b) => a - b);
  for (const tick of xTicks) {
    const x = sx(tick);
    parts.push(`<line x1="${x}" y1="${y0}" x2="${x}" y2="${y0 + 4}" stroke="black"/>`);
    parts.push(`<text x="${x}" y="${y0 + 18}" text-anchor="middle" font-size="11">${tick}</text>`);
  }
  parts.push(`<text x="20" y="${MARGIN.top + PLOT_H / 2}" font-size="13" transform="rotate(-90 20 ${MARGIN.top + PLOT_H / 2})" text-anchor="middle">${esc(spec.yLabel)}</text>`);
  parts.push(`<text x="${MARGIN.left + PLOT_W / 2}" y="${y0 + 40}" text-anchor="middle" font-size="13">${esc(spec.xLabel)}</text>`);

  spec.series.forEach((series, si) => {
    const color = PALETTE[si % PALETTE.length];
    const path = series.points
      .map((p) => `${sx(p.x).toFixed(2)},${sy(p.y).toFixed(2)}`)
      .join(" ");
    parts.push(`<polyline points="${path}" fill="none" stroke="${color}" stroke-width="2"/>`);
    for (const p of series.points) {
      parts.push(`<circle cx="${sx(p.x).toFixed(2)}" cy="${sy(p.y).toFixed(2)}" r="3" fill="${color}"/>`);
    }
  });

  parts.push(...legend(spec.series.map((s) => s.label)));
  parts.push("</svg>");
  return parts.join("\n");
}
