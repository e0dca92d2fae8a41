#!/usr/bin/env node
/** plot diagonal --in a.csv b.csv [--ref wedge,qd] [--title t] --out fig.svg
 *  plot heatmap  --in k.csv [--title t] --out fig.svg
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseKernel, parseReport } from "./csv.js";
import { renderDiagonalOverlay } from "./diagonal.js";
import { renderKernelHeatmap } from "./heatmap.js";

interface Args {
  inputs: string[];
  out: string | null;
  refs: string[] | null;
  title: string | null;
}

function parseArgs(argv: string[]): Args {
  const args: Args = { inputs: [], out: null, refs: null, title: null };
  let i = 0;
  while (i < argv.length) {
    const tok = argv[i];
    if (tok === "--in") {
      i += 1;
      while (i < argv.length && !argv[i].startsWith("--")) {
        args.inputs.push(argv[i]);
        i += 1;
      }
    } else if (tok === "--out") {
      args.out = argv[i + 1];
      i += 2;
    } else if (tok === "--ref") {
      args.refs = argv[i + 1].split(",").filter(Boolean);
      i += 2;
    } else if (tok === "--title") {
      args.title = argv[i + 1];
      i += 2;
    } else {
      throw new Error(`unknown argument ${tok}`);
    }
  }
  if (args.inputs.length === 0) throw new Error("--in requires at least one file");
  if (!args.out) throw new Error("--out is required");
  return args;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command !== "diagonal" && command !== "heatmap") {
    process.stderr.write("usage: plot {diagonal|heatmap} --in <csv...> [--ref names] " +
      "[--title t] --out fig.svg\n");
    return 2;
  }
  let svg: string;
  try {
    const args = parseArgs(rest);
    if (command === "diagonal") {
      const reports = args.inputs.map((path) => parseReport(readFileSync(path, "utf8")));
      svg = renderDiagonalOverlay({
        reports,
        refNames: args.refs ?? undefined,
        title: args.title ?? undefined,
      });
    } else {
      if (args.inputs.length !== 1) throw new Error("heatmap takes exactly one --in file");
      const kernel = parseKernel(readFileSync(args.inputs[0], "utf8"));
      svg = renderKernelHeatmap({ kernel, title: args.title ?? undefined });
    }
    writeFileSync(args.out!, svg);
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : err}\n`);
    return 1;
  }
  process.stdout.write(`wrote ${rest[rest.indexOf("--out") + 1]}\n`);
  return 0;
}

const invokedDirectly = process.argv[1] && import.meta.url.endsWith(
  process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
