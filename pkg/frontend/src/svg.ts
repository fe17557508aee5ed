/**
 * Deterministic SVG chart primitives: fixed canvas, fixed palette, no
 * randomness, so regenerated figures are byte-stable.
 */

export interface Series {
  label: string;
  points: Array<[number, number]>;
  /** stroke-dasharray, e.g. "6 3" for dashed IC curves */
  dash?: string;
  /** right-hand axis series when a chart is dual-axis */
  axis?: "left" | "right";
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  y2Label?: string;
  series: Series[];
}

export const WIDTH = 860;
export const HEIGHT = 560;
const MARGIN = { top: 48, right: 86, bottom: 64, left: 86 };

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#e377c2",
  "#bcbd22",
  "#7f7f7f",
];

interface Range {
  min: number;
  max: number;
}

function extent(values: number[]): Range {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (!Number.isFinite(min) || !Number.isFinite(max)) {
    throw new Error("cannot scale: no finite values");
  }
  if (min === max) {
    min -= 1;
    max += 1;
  }
  return { min, max };
}

function ticks(range: Range, count = 6): number[] {
  const span = range.max - range.min;
  const step = span / (count - 1);
  return Array.from({ length: count }, (_, i) => range.min + i * step);
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1000 || a < 0.01) return v.toExponential(1);
  return Number(v.toPrecision(4)).toString();
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export function renderChart(spec: ChartSpec): string {
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

  const leftSeries = spec.series.filter((s) => (s.axis ?? "left") === "left");
  const rightSeries = spec.series.filter((s) => s.axis === "right");
  if (leftSeries.length === 0) {
    throw new Error("chart needs at least one left-axis series");
  }

  const xAll = spec.series.flatMap((s) => s.points.map((p) => p[0]));
  const xr = extent(xAll);
  const yr = extent(leftSeries.flatMap((s) => s.points.map((p) => p[1])));
  const y2r = rightSeries.length
    ? extent(rightSeries.flatMap((s) => s.points.map((p) => p[1])))
    : null;

  const sx = (x: number) =>
    MARGIN.left + ((x - xr.min) / (xr.max - xr.min)) * plotW;
  const sy = (y: number) =>
    MARGIN.top + plotH - ((y - yr.min) / (yr.max - yr.min)) * plotH;
  const sy2 = (y: number) =>
    MARGIN.top + plotH - ((y - y2r!.min) / (y2r!.max - y2r!.min)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="17">${esc(spec.title)}</text>`,
  );

  // grid + tick labels
  for (const t of ticks(xr)) {
    const x = sx(t);
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${MARGIN.top + plotH}" stroke="#dddddd"/>`,
    );
    parts.push(
      `<text x="${x}" y="${MARGIN.top + plotH + 20}" text-anchor="middle" font-size="12">${fmt(t)}</text>`,
    );
  }
  for (const t of ticks(yr)) {
    const y = sy(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotW}" y2="${y}" stroke="#dddddd"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${y + 4}" text-anchor="end" font-size="12">${fmt(t)}</text>`,
    );
  }
  if (y2r) {
    for (const t of ticks(y2r)) {
      const y = sy2(t);
      parts.push(
        `<text x="${MARGIN.left + plotW + 8}" y="${y + 4}" text-anchor="start" font-size="12">${fmt(t)}</text>`,
      );
    }
  }

  // frame and axis labels
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333333"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 18}" text-anchor="middle" font-size="14">${esc(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text transform="translate(22 ${MARGIN.top + plotH / 2}) rotate(-90)" text-anchor="middle" font-size="14">${esc(spec.yLabel)}</text>`,
  );
  if (spec.y2Label) {
    parts.push(
      `<text transform="translate(${WIDTH - 18} ${MARGIN.top + plotH / 2}) rotate(90)" text-anchor="middle" font-size="14">${esc(spec.y2Label)}</text>`,
    );
  }

  // series
  spec.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const scale = s.axis === "right" ? sy2 : sy;
    const pts = s.points
      .map(([x, y]) => `${sx(x).toFixed(2)},${scale(y).toFixed(2)}`)
      .join(" ");
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="2"${dash} class="series" data-label="${esc(s.label)}"/>`,
    );
  });

  // legend
  spec.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const y = MARGIN.top + 14 + i * 18;
    const x = MARGIN.left + 12;
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<line x1="${x}" y1="${y - 4}" x2="${x + 26}" y2="${y - 4}" stroke="${color}" stroke-width="2"${dash}/>`,
    );
    parts.push(
      `<text x="${x + 32}" y="${y}" font-size="12" class="legend">${esc(s.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
