/** Tiny SVG precision-recall chart (no chart library needed). */

import type { PrPoint } from "./api";

export interface ChartBox {
  width: number;
  height: number;
  pad: number;
}

export const DEFAULT_BOX: ChartBox = { width: 280, height: 180, pad: 24 };

/** SVG path ("M x y L x y ...") for a PR curve inside the chart box. */
export function prPath(points: PrPoint[], box: ChartBox = DEFAULT_BOX): string {
  if (points.length === 0) return "";
  const plotW = box.width - 2 * box.pad;
  const plotH = box.height - 2 * box.pad;
  const parts = points.map(([recall, precision], i) => {
    const x = box.pad + recall * plotW;
    const y = box.height - box.pad - precision * plotH;
    return `${i === 0 ? "M" : "L"}${round2(x)} ${round2(y)}`;
  });
  return parts.join(" ");
}

export function prChartSvg(points: PrPoint[], box: ChartBox = DEFAULT_BOX): string {
  const axis =
    `M${box.pad} ${box.pad} L${box.pad} ${box.height - box.pad} ` +
    `L${box.width - box.pad} ${box.height - box.pad}`;
  return (
    `<svg viewBox="0 0 ${box.width} ${box.height}" class="pr-chart" role="img">` +
    `<path d="${axis}" class="pr-axis" fill="none"/>` +
    `<path d="${prPath(points, box)}" class="pr-line" fill="none"/>` +
    `<text x="${box.width / 2}" y="${box.height - 4}" class="pr-label">recall</text>` +
    `<text x="8" y="${box.height / 2}" class="pr-label" transform="rotate(-90 8 ${box.height / 2})">precision</text>` +
    `</svg>`
  );
}

function round2(x: number): number {
  return Math.round(x * 100) / 100;
}
