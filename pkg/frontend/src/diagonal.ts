/** Smeared-diagonal overlay: one dashed series with cross markers per report,
 * reference curves as solid lines, legend from the report metadata. */

import { Report } from "./csv.js";
import { linearScale, padded, ticks, formatTick } from "./scale.js";
import { cross, polylinePath, svgDocument, tag, esc } from "./svg.js";

const SERIES_COLORS = ["#c0392b", "#2471a3", "#1e8449", "#b7950b", "#7d3c98", "#b03a2e"];
const REF_COLOR = "#222222";

export interface DiagonalSpec {
  reports: Report[];
  refNames?: string[];      // subset of the reports' reference columns
  title?: string;
  width?: number;
  height?: number;
}

function seriesLabel(report: Report): string {
  const meta = report.metadata;
  const bits: string[] = [];
  if (meta.mass !== undefined) bits.push(`m = ${meta.mass}`);
  if (meta.scenario === "cone4d" && meta.ell !== undefined) bits.push(`l = ${meta.ell}`);
  if (meta.n !== undefined) bits.push(`n = ${meta.n}`);
  return bits.join(", ") || "series";
}

export function renderDiagonalOverlay(spec: DiagonalSpec): string {
  const { reports } = spec;
  if (reports.length === 0) {
    throw new Error("no reports to plot");
  }
  const refNames = spec.refNames ?? reports[0].refNames;
  for (const name of refNames) {
    if (!reports[0].refNames.includes(name)) {
      throw new Error(`reference ${name} not present in the report ` +
        `(has: ${reports[0].refNames.join(", ") || "none"})`);
    }
  }
  const width = spec.width ?? 760;
  const height = spec.height ?? 480;
  const margin = { left: 64, right: 16, top: 40, bottom: 48 };

  const mus: number[] = [];
  const values: number[] = [];
  for (const report of reports) {
    for (const row of report.rows) {
      mus.push(row.mu);
      values.push(row.value);
      for (const name of refNames) {
        if (row.refs[name] !== undefined) values.push(row.refs[name]);
      }
    }
  }
  const x = linearScale(padded(Math.min(...mus), Math.max(...mus)),
    [margin.left, width - margin.right]);
  const y = linearScale(padded(Math.min(...values), Math.max(...values)),
    [height - margin.bottom, margin.top]);

  const body: string[] = [];
  // axes
  for (const t of ticks(x.domain[0], x.domain[1])) {
    body.push(tag("line", { x1: x(t), x2: x(t), y1: margin.top, y2: height - margin.bottom,
      stroke: "#dddddd", "stroke-width": 1 }));
    body.push(tag("text", { x: x(t), y: height - margin.bottom + 18, "text-anchor": "middle",
      "font-size": 12 }, esc(formatTick(t))));
  }
  for (const t of ticks(y.domain[0], y.domain[1])) {
    body.push(tag("line", { x1: margin.left, x2: width - margin.right, y1: y(t), y2: y(t),
      stroke: "#dddddd", "stroke-width": 1 }));
    body.push(tag("text", { x: margin.left - 8, y: y(t) + 4, "text-anchor": "end",
      "font-size": 12 }, esc(formatTick(t))));
  }
  body.push(tag("rect", { x: margin.left, y: margin.top, width: width - margin.left - margin.right,
    height: height - margin.top - margin.bottom, fill: "none", stroke: "#444444" }));
  body.push(tag("text", { x: (margin.left + width - margin.right) / 2,
    y: height - 12, "text-anchor": "middle", "font-size": 13 }, "probe position"));
  if (spec.title) {
    body.push(tag("text", { x: margin.left, y: 24, "font-size": 15, "font-weight": "bold" },
      esc(spec.title)));
  }

  // reference curves from the first report (solid)
  const sortedRows = [...reports[0].rows].sort((a, b) => a.mu - b.mu);
  for (const name of refNames) {
    const pts = sortedRows.map((row): [number, number] => [x(row.mu), y(row.refs[name])]);
    body.push(tag("path", { d: polylinePath(pts), fill: "none", stroke: REF_COLOR,
      "stroke-width": 2 }));
    const last = sortedRows[sortedRows.length - 1];
    body.push(tag("text", { x: x(last.mu) - 4, y: y(last.refs[name]) - 6,
      "text-anchor": "end", "font-size": 11, fill: REF_COLOR }, esc(name)));
  }

  // numeric series (dashed with crosses)
  reports.forEach((report, idx) => {
    const color = SERIES_COLORS[idx % SERIES_COLORS.length];
    const rows = [...report.rows].sort((a, b) => a.mu - b.mu);
    const pts = rows.map((row): [number, number] => [x(row.mu), y(row.value)]);
    body.push(tag("path", { d: polylinePath(pts), fill: "none", stroke: color,
      "stroke-width": 1.5, "stroke-dasharray": "6 4" }));
    const marks = pts.map(([px, py]) => cross(px, py, 7)).join(" ");
    body.push(tag("path", { d: marks, stroke: color, "stroke-width": 1.5, fill: "none" }));
    // legend entry
    const ly = margin.top + 16 + idx * 18;
    body.push(tag("line", { x1: width - margin.right - 150, x2: width - margin.right - 118,
      y1: ly, y2: ly, stroke: color, "stroke-width": 1.5, "stroke-dasharray": "6 4" }));
    body.push(tag("text", { x: width - margin.right - 112, y: ly + 4, "font-size": 12 },
      esc(seriesLabel(report))));
  });

  return svgDocument(width, height, body);
}
