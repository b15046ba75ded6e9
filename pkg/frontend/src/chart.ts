// Pure SVG markup builder for density curves; no DOM access so it renders
// identically under tests and in the browser.

import type { Grid } from "./api.js";

export interface Curve {
  grid: Grid;
  colour: string;
  dashed?: boolean;
  label?: string;
}

export interface ChartOptions {
  width?: number;
  height?: number;
  meanLine?: number | null;
}

export function renderChart(curves: Curve[], opts: ChartOptions = {}): string {
  const width = opts.width ?? 560;
  const height = opts.height ?? 300;
  const m = { left: 42, right: 10, top: 12, bottom: 30 };
  let yMax = 1e-9;
  for (const c of curves) {
    for (const d of c.grid.density) {
      if (d > yMax) yMax = d;
    }
  }
  yMax *= 1.05;
  const sx = (t: number) => m.left + (width - m.left - m.right) * t;
  const sy = (d: number) =>
    height - m.bottom - (height - m.top - m.bottom) * (d / yMax);

  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="density-chart">`,
    `<line x1="${m.left}" y1="${height - m.bottom}" x2="${width - m.right}" y2="${height - m.bottom}" stroke="#444"/>`,
    `<line x1="${m.left}" y1="${height - m.bottom}" x2="${m.left}" y2="${m.top}" stroke="#444"/>`,
  ];
  for (const tick of [0, 0.25, 0.5, 0.75, 1]) {
    const x = sx(tick).toFixed(1);
    parts.push(
      `<line x1="${x}" y1="${height - m.bottom}" x2="${x}" y2="${height - m.bottom + 4}" stroke="#444"/>`,
      `<text x="${x}" y="${height - m.bottom + 16}" font-size="10" text-anchor="middle">${tick}</text>`,
    );
  }
  let legendY = m.top + 12;
  for (const curve of curves) {
    const pts = curve.grid.theta
      .map((t, i) => `${sx(t).toFixed(1)},${sy(curve.grid.density[i]).toFixed(1)}`)
      .join(" ");
    const dash = curve.dashed ? ' stroke-dasharray="6,4"' : "";
    parts.push(
      `<polyline class="curve" data-label="${curve.label ?? ""}" points="${pts}" fill="none" stroke="${curve.colour}" stroke-width="1.8"${dash}/>`,
    );
    if (curve.label) {
      parts.push(
        `<text x="${width - m.right - 6}" y="${legendY}" font-size="11" text-anchor="end" fill="${curve.colour}">${curve.label}</text>`,
      );
      legendY += 14;
    }
  }
  if (opts.meanLine != null) {
    const x = sx(opts.meanLine).toFixed(1);
    parts.push(
      `<line class="mean-line" x1="${x}" y1="${height - m.bottom}" x2="${x}" y2="${m.top}" stroke="#d62728" stroke-dasharray="7,3,2,3"/>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
