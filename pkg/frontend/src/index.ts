export { parseReport, parseKernel, kernelAsymmetry } from "./csv.js";
export type { Report, ReportRow, KernelMatrix, KernelCell } from "./csv.js";
export { renderDiagonalOverlay } from "./diagonal.js";
export { renderKernelHeatmap } from "./heatmap.js";
export { divergingColor, robustLimit, valueToT } from "./colormap.js";
export { linearScale, ticks } from "./scale.js";
