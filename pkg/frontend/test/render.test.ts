import { describe, expect, it } from "vitest";
import { readFileSync, writeFileSync, mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";
import { parseKernel, parseReport } from "../src/csv.js";
import { renderDiagonalOverlay } from "../src/diagonal.js";
import { renderKernelHeatmap } from "../src/heatmap.js";
import { divergingColor, robustLimit, valueToT } from "../src/colormap.js";
import { ticks } from "../src/scale.js";
import { main } from "../src/cli.js";

const DATA = join(dirname(fileURLToPath(import.meta.url)), "..", "..", "data");
const report = (name: string) => parseReport(readFileSync(join(DATA, name), "utf8"));

describe("diagonal overlay", () => {
  it("renders three shipped wedge reports with the reference line", () => {
    const reports = ["wedge_n32_m0.5.csv", "wedge_n32_m1.csv", "wedge_n32_m2.csv"]
      .map(report);
    const svg = renderDiagonalOverlay({ reports, refNames: ["wedge"], title: "boost check" });
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg).toContain("stroke-dasharray");           // numeric series dashed
    expect(svg).toContain("m = 0.5");                    // legend from metadata
    expect(svg).toContain("m = 2");
    expect(svg).toContain("boost check");
    expect(svg).not.toContain("NaN");
    expect((svg.match(/stroke-dasharray/g) ?? []).length).toBeGreaterThanOrEqual(3);
  });

  it("renders a single report", () => {
    const svg = renderDiagonalOverlay({ reports: [report("wedge_n32_m1.csv")] });
    expect(svg).toContain("</svg>");
  });

  it("rejects an unknown reference name", () => {
    expect(() => renderDiagonalOverlay({
      reports: [report("wedge_n32_m1.csv")], refNames: ["qd"],
    })).toThrow(/reference qd not present/);
  });

  it("rejects empty input", () => {
    expect(() => renderDiagonalOverlay({ reports: [] })).toThrow(/no reports/);
  });
});

describe("kernel heatmap", () => {
  it("renders the shipped kernel with a visible diagonal band", () => {
    const kernel = parseKernel(readFileSync(join(DATA, "wedge_n32_m1_kernel.csv"), "utf8"));
    const svg = renderKernelHeatmap({ kernel });
    expect(svg.startsWith("<svg ")).toBe(true);
    expect((svg.match(/<rect /g) ?? []).length).toBeGreaterThan(32 * 32);
    expect(svg).not.toContain("NaN");
    expect(svg).not.toContain("warning");
  });

  it("handles an all-zero matrix with a uniform neutral color", () => {
    const rows = ["i,j,x_i,y_j,value"];
    for (let i = 0; i < 2; i++) for (let j = 0; j < 2; j++) {
      rows.push(`${i},${j},${i},${j},0`);
    }
    const svg = renderKernelHeatmap({ kernel: parseKernel(rows.join("\n")) });
    const neutral = divergingColor(0.5);
    expect((svg.match(new RegExp(neutral.replace(/[()]/g, "."), "g")) ?? []).length)
      .toBeGreaterThanOrEqual(4);
  });

  it("annotates asymmetric input with a warning", () => {
    const text = "i,j,x_i,y_j,value\n0,0,0,0,1\n0,1,0,1,2\n1,0,1,0,1\n1,1,1,1,1\n";
    const svg = renderKernelHeatmap({ kernel: parseKernel(text) });
    expect(svg).toContain("warning: kernel asymmetric");
  });
});

describe("colormap", () => {
  it("is neutral at the center and saturated at the ends", () => {
    expect(divergingColor(0.5)).toBe("rgb(244,244,242)");
    expect(divergingColor(0)).toBe("rgb(139,0,0)");
    expect(divergingColor(1)).toBe("rgb(0,0,139)");
    expect(divergingColor(-5)).toBe(divergingColor(0));
    expect(divergingColor(7)).toBe(divergingColor(1));
  });

  it("uses robust quantile limits", () => {
    const values = Array.from({ length: 1000 }, (_, k) => (k % 2 ? 1 : -1) * (k / 1000));
    values.push(1e9);   // outlier must not widen the scale
    expect(robustLimit(values)).toBeLessThan(2);
    expect(valueToT(0, 1)).toBe(0.5);
    expect(valueToT(99, 1)).toBe(1);
  });
});

describe("ticks", () => {
  it("produces round steps covering the domain", () => {
    const t = ticks(-2, 2, 6);
    expect(t).toContain(0);
    expect(t[0]).toBeGreaterThanOrEqual(-2);
    expect(t[t.length - 1]).toBeLessThanOrEqual(2 + 1e-9);
  });
});

describe("cli", () => {
  it("writes SVG files end to end and fails cleanly on bad input", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    const fig1 = join(dir, "overlay.svg");
    expect(main(["diagonal", "--in",
      join(DATA, "wedge_n32_m0.5.csv"), join(DATA, "wedge_n32_m1.csv"),
      join(DATA, "wedge_n32_m2.csv"),
      "--ref", "wedge", "--out", fig1])).toBe(0);
    expect(readFileSync(fig1, "utf8")).toContain("</svg>");

    const fig2 = join(dir, "heat.svg");
    expect(main(["heatmap", "--in", join(DATA, "wedge_n32_m1_kernel.csv"),
      "--out", fig2])).toBe(0);
    expect(readFileSync(fig2, "utf8").length).toBeGreaterThan(1000);

    const empty = join(dir, "empty.csv");
    writeFileSync(empty, "mu,value\n");
    expect(main(["diagonal", "--in", empty, "--out", join(dir, "x.svg")])).toBe(1);
    expect(main(["nope"])).toBe(2);
    expect(main(["heatmap", "--in", "a", "b", "--out", join(dir, "y.svg")])).toBe(1);
  });
});
