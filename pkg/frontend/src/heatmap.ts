/** Kernel heatmap: one filled rect per matrix cell in physical coordinates,
 * diverging color scale centered at zero with robust quantile limits. */

import { KernelMatrix, kernelAsymmetry } from "./csv.js";
import { divergingColor, robustLimit, valueToT } from "./colormap.js";
import { linearScale, ticks, formatTick } from "./scale.js";
import { svgDocument, tag, esc } from "./svg.js";

export interface HeatmapSpec {
  kernel: KernelMatrix;
  title?: string;
  width?: number;
  height?: number;
  asymmetryWarnThreshold?: number;
}

export function renderKernelHeatmap(spec: HeatmapSpec): string {
  const kernel = spec.kernel;
  const width = spec.width ?? 640;
  const height = spec.height ?? 640;
  const margin = { left: 64, right: 24, top: 40, bottom: 52 };

  const xs = kernel.cells.map((c) => c.x);
  const ys = kernel.cells.map((c) => c.y);
  const limit = robustLimit(kernel.cells.map((c) => c.value));

  // physical cell boundaries from the sorted distinct centers
  const centers = [...new Set(xs)].sort((a, b) => a - b);
  const edges: number[] = [];
  for (let k = 0; k < centers.length; k++) {
    if (k === 0) {
      edges.push(centers[0] - (centers[1] - centers[0]) / 2);
    } else {
      edges.push((centers[k - 1] + centers[k]) / 2);
    }
  }
  edges.push(centers[centers.length - 1]
    + (centers[centers.length - 1] - centers[centers.length - 2]) / 2);
  const edgeOf = new Map<number, number>();
  centers.forEach((c, idx) => edgeOf.set(c, idx));

  const lo = edges[0];
  const hi = edges[edges.length - 1];
  const x = linearScale([lo, hi], [margin.left, width - margin.right]);
  const y = linearScale([lo, hi], [height - margin.bottom, margin.top]);

  const body: string[] = [];
  for (const cell of kernel.cells) {
    const ix = edgeOf.get(cell.x)!;
    const iy = edgeOf.get(cell.y)!;
    const x0 = x(edges[ix]);
    const x1 = x(edges[ix + 1]);
    const y0 = y(edges[iy + 1]);
    const y1 = y(edges[iy]);
    body.push(tag("rect", {
      x: x0, y: y0, width: x1 - x0 + 0.4, height: y1 - y0 + 0.4,
      fill: divergingColor(valueToT(cell.value, limit)),
    }));
  }
  body.push(tag("rect", { x: margin.left, y: margin.top,
    width: width - margin.left - margin.right,
    height: height - margin.top - margin.bottom, fill: "none", stroke: "#444444" }));
  for (const t of ticks(lo, hi)) {
    body.push(tag("text", { x: x(t), y: height - margin.bottom + 18,
      "text-anchor": "middle", "font-size": 12 }, esc(formatTick(t))));
    body.push(tag("text", { x: margin.left - 8, y: y(t) + 4, "text-anchor": "end",
      "font-size": 12 }, esc(formatTick(t))));
  }
  if (spec.title) {
    body.push(tag("text", { x: margin.left, y: 24, "font-size": 15,
      "font-weight": "bold" }, esc(spec.title)));
  }
  const asym = kernelAsymmetry(kernel);
  if (asym > (spec.asymmetryWarnThreshold ?? 1e-12)) {
    body.push(tag("text", { x: margin.left, y: height - 10, "font-size": 12,
      fill: "#b03a2e" },
      esc(`warning: kernel asymmetric (relative skew ${asym.toExponential(2)})`)));
  }
  // color bar
  const barX = width - margin.right - 14;
  const steps = 48;
  const barTop = margin.top + 8;
  const barH = 160;
  for (let k = 0; k < steps; k++) {
    body.push(tag("rect", {
      x: barX, y: barTop + (barH / steps) * (steps - 1 - k),
      width: 10, height: barH / steps + 0.4,
      fill: divergingColor(k / (steps - 1)),
    }));
  }
  body.push(tag("text", { x: barX - 4, y: barTop + 6, "text-anchor": "end",
    "font-size": 10 }, esc(`+${formatTick(limit)}`)));
  body.push(tag("text", { x: barX - 4, y: barTop + barH, "text-anchor": "end",
    "font-size": 10 }, esc(`-${formatTick(limit)}`)));
  return svgDocument(width, height, body);
}
