/** ECharts option builders for the four figure kinds. */

import type { EChartsOption, SeriesOption } from "echarts";

import { averageSeries, smoothAndThin, RunData } from "./data";
import { Candle, MergedSummary, SchemaError, Summary } from "./schema";

const ALGO_COLORS: Record<string, string> = {
  safehaul: "#2266aa",
  risk_neutral: "#cc7722",
  mlr: "#55aa55",
};

const BASE: Partial<EChartsOption> = {
  animation: false,
  backgroundColor: "#ffffff",
  textStyle: { fontFamily: "sans-serif" },
};

function algosOf<T>(byAlgo: Map<string, T>): string[] {
  return [...byAlgo.keys()].sort();
}

export function timeseriesOption(data: RunData): EChartsOption {
  if (data.metrics.length === 0) {
    throw new SchemaError("time series need at least one metrics.csv");
  }
  const byAlgo = new Map<string, typeof data.metrics>();
  for (const m of data.metrics) {
    const algo = m.rows[0].algo;
    byAlgo.set(algo, [...(byAlgo.get(algo) ?? []), m]);
  }
  const slotMs = 0.125;
  const panels: { metric: "avg_latency_ms" | "throughput_mbps" | "drop_rate"; title: string }[] = [
    { metric: "avg_latency_ms", title: "Average latency [ms]" },
    { metric: "throughput_mbps", title: "Delivered throughput [Mbit/s]" },
    { metric: "drop_rate", title: "Packet drop rate" },
  ];
  const grids = panels.map((_, i) => ({
    left: 70,
    right: 30,
    top: 40 + i * 300,
    height: 230,
  }));
  const series: SeriesOption[] = [];
  panels.forEach((panel, i) => {
    for (const algo of algosOf(byAlgo)) {
      const runs = byAlgo.get(algo)!.map((m) => m.rows);
      const averaged = averageSeries(runs, panel.metric);
      const points = smoothAndThin(averaged, 64, 1500).map(([slot, v]) => [slot * slotMs, v]);
      series.push({
        type: "line",
        name: algo,
        xAxisIndex: i,
        yAxisIndex: i,
        showSymbol: false,
        lineStyle: { width: 1.5 },
        color: ALGO_COLORS[algo],
        data: points,
      });
    }
  });
  return {
    ...BASE,
    legend: { top: 5 },
    grid: grids,
    xAxis: panels.map((_, i) => ({
      gridIndex: i,
      type: "value",
      name: "time [ms]",
      nameLocation: "middle",
      nameGap: 25,
    })),
    yAxis: panels.map((panel, i) => ({
      gridIndex: i,
      type: "value",
      name: panel.title,
      nameLocation: "middle",
      nameGap: 45,
    })),
  } as EChartsOption;
}

interface CandlePoint {
  x: number;
  algo: string;
  candle: Candle;
}

function candlePoints(
  data: RunData,
  xField: "n_nodes" | "n_donors",
  which: "latency_candlestick" | "throughput_candlestick" | "droprate_candlestick"
): CandlePoint[] {
  const points: CandlePoint[] = [];
  // merged aggregates are authoritative; fall back to single-run summaries
  const seen = new Set<string>();
  const take = (cfg: { algo: string } & Record<string, unknown>, candle: Candle | null) => {
    if (!candle) return;
    const x = Number(cfg[xField]);
    const key = `${cfg.algo}@${x}`;
    if (seen.has(key)) return;
    seen.add(key);
    points.push({ x, algo: cfg.algo, candle });
  };
  for (const { merged } of data.merged) {
    take(merged.config, merged.system[which]);
  }
  for (const { summary } of data.summaries) {
    take(summary.config, summary.system[which]);
  }
  if (points.length === 0) {
    throw new SchemaError(`no candlestick aggregates found for ${xField}`);
  }
  return points.sort((a, b) => a.x - b.x || a.algo.localeCompare(b.algo));
}

export function candlesOption(data: RunData, xField: "n_nodes" | "n_donors"): EChartsOption {
  const points = candlePoints(data, xField, "latency_candlestick");
  const algos = [...new Set(points.map((p) => p.algo))].sort();
  const xs = [...new Set(points.map((p) => p.x))].sort((a, b) => a - b);
  const categories = xs.map(String);
  const series: SeriesOption[] = [];
  for (const algo of algos) {
    const mine = points.filter((p) => p.algo === algo);
    series.push({
      type: "candlestick",
      name: algo,
      barWidth: Math.max(8, 40 / algos.length),
      itemStyle: {
        color: ALGO_COLORS[algo],
        color0: ALGO_COLORS[algo],
        borderColor: ALGO_COLORS[algo],
        borderColor0: ALGO_COLORS[algo],
      },
      // candle body spans p10..p90, whiskers span min..max
      data: xs.map((x) => {
        const p = mine.find((q) => q.x === x);
        return p ? [p.candle.p10, p.candle.p90, p.candle.min, p.candle.max] : ["-", "-", "-", "-"];
      }),
    });
    series.push({
      type: "scatter",
      name: `${algo} mean`,
      symbol: "diamond",
      symbolSize: 9,
      color: ALGO_COLORS[algo],
      data: xs.map((x) => {
        const p = mine.find((q) => q.x === x);
        return p ? p.candle.mean : "-";
      }),
    });
  }
  const xName = xField === "n_nodes" ? "IAB nodes" : "IAB donors";
  return {
    ...BASE,
    legend: { top: 5 },
    grid: { left: 70, right: 30, top: 40, bottom: 50 },
    xAxis: { type: "category", data: categories, name: xName, nameLocation: "middle", nameGap: 30 },
    yAxis: { type: "value", name: "per-UE latency [ms]", nameLocation: "middle", nameGap: 45 },
    series,
  } as EChartsOption;
}

export function latencyVsAlphaOption(data: RunData): EChartsOption {
  interface Point {
    alpha: number;
    latency: number;
  }
  const points: Point[] = [];
  const seen = new Set<number>();
  const take = (cfg: Record<string, unknown>, latency: number | null) => {
    if (latency === null || latency === undefined) return;
    const alpha = Number(cfg.alpha);
    if (seen.has(alpha)) return;
    seen.add(alpha);
    points.push({ alpha, latency });
  };
  for (const { merged } of data.merged) {
    take(merged.config, merged.system.avg_latency_ms);
  }
  for (const { summary } of data.summaries) {
    take(summary.config, summary.system.avg_latency_ms);
  }
  if (points.length === 0) {
    throw new SchemaError("no latency aggregates with an alpha found");
  }
  points.sort((a, b) => a.alpha - b.alpha);
  return {
    ...BASE,
    grid: { left: 70, right: 30, top: 30, bottom: 50 },
    xAxis: {
      type: "value",
      name: "risk level",
      nameLocation: "middle",
      nameGap: 30,
      min: 0,
      max: 1,
    },
    yAxis: { type: "value", name: "average latency [ms]", nameLocation: "middle", nameGap: 45 },
    series: [
      {
        type: "line",
        name: "safehaul",
        color: ALGO_COLORS.safehaul,
        symbol: "circle",
        symbolSize: 8,
        data: points.map((p) => [p.alpha, p.latency]),
      },
    ],
  } as EChartsOption;
}
