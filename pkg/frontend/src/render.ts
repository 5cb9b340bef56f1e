/** Headless option-to-PNG rendering: ECharts SSR gives SVG, resvg rasterises. */

import * as fs from "fs";
import * as path from "path";

import { Resvg } from "@resvg/resvg-js";
import * as echarts from "echarts";
import type { EChartsOption } from "echarts";

export function renderPng(option: EChartsOption, outPath: string, width: number, height: number): void {
  const chart = echarts.init(null as unknown as HTMLElement, null, {
    renderer: "svg",
    ssr: true,
    width,
    height,
  });
  try {
    chart.setOption(option);
    const svg = chart.renderToSVGString();
    const png = new Resvg(svg, { fitTo: { mode: "width", value: width } }).render().asPng();
    fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
    fs.writeFileSync(outPath, png);
  } finally {
    chart.dispose();
  }
}
