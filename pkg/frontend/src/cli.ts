#!/usr/bin/env node
/** `render --in <dir> --kind <kind> --out <file.png>` */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { candlesOption, latencyVsAlphaOption, timeseriesOption } from "./charts";
import { loadRuns } from "./data";
import { renderPng } from "./render";
import { SchemaError } from "./schema";

export const KINDS = [
  "timeseries",
  "candlestick_vs_nodes",
  "candlestick_vs_donors",
  "latency_vs_alpha",
] as const;
export type Kind = (typeof KINDS)[number];

export function renderFigure(inputDir: string, kind: Kind, outPath: string): void {
  const data = loadRuns(inputDir);
  switch (kind) {
    case "timeseries":
      // one image, three stacked panels: latency, throughput, drop rate
      renderPng(timeseriesOption(data), outPath, 900, 960);
      break;
    case "candlestick_vs_nodes":
      renderPng(candlesOption(data, "n_nodes"), outPath, 760, 520);
      break;
    case "candlestick_vs_donors":
      renderPng(candlesOption(data, "n_donors"), outPath, 760, 520);
      break;
    case "latency_vs_alpha":
      renderPng(latencyVsAlphaOption(data), outPath, 760, 520);
      break;
  }
}

export function main(argv: string[]): number {
  const args = yargs(argv)
    .command("render", "render one figure from simulator outputs", (y) =>
      y
        .option("in", { type: "string", demandOption: true, describe: "directory with run outputs" })
        .option("kind", { choices: KINDS, demandOption: true })
        .option("out", { type: "string", demandOption: true, describe: "output image (.png)" })
    )
    .demandCommand(1)
    .strict()
    .exitProcess(false)
    .parseSync();
  try {
    renderFigure(args.in as string, args.kind as Kind, args.out as string);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    throw err;
  }
  console.log(`wrote ${args.out}`);
  return 0;
}

if (require.main === module) {
  process.exit(main(hideBin(process.argv)));
}
