/** Discovery and loading of simulator outputs below an input directory. */

import * as fs from "fs";
import * as path from "path";

import {
  MergedSummary,
  MetricsRow,
  SchemaError,
  Summary,
  parseMergedSummary,
  parseMetricsCsv,
  parseSummary,
} from "./schema";

export interface RunData {
  metrics: { source: string; rows: MetricsRow[] }[];
  summaries: { source: string; summary: Summary }[];
  merged: { source: string; merged: MergedSummary }[];
}

function walk(dir: string, out: string[] = []): string[] {
  for (const entry of fs.readdirSync(dir, { withFileTypes: true })) {
    const full = path.join(dir, entry.name);
    if (entry.isDirectory()) {
      walk(full, out);
    } else {
      out.push(full);
    }
  }
  return out;
}

export function loadRuns(inputDir: string): RunData {
  if (!fs.existsSync(inputDir)) {
    throw new SchemaError(`input directory ${inputDir} does not exist`);
  }
  const files = walk(inputDir).sort();
  const data: RunData = { metrics: [], summaries: [], merged: [] };
  for (const file of files) {
    const base = path.basename(file);
    if (base === "metrics.csv") {
      data.metrics.push({ source: file, rows: parseMetricsCsv(fs.readFileSync(file, "utf8"), file) });
    } else if (base === "summary.json") {
      data.summaries.push({ source: file, summary: parseSummary(fs.readFileSync(file, "utf8"), file) });
    } else if (base.startsWith("merged_") && base.endsWith(".json")) {
      data.merged.push({ source: file, merged: parseMergedSummary(fs.readFileSync(file, "utf8"), file) });
    }
  }
  if (data.metrics.length === 0 && data.summaries.length === 0 && data.merged.length === 0) {
    throw new SchemaError(`no metrics.csv, summary.json or merged_*.json under ${inputDir}`);
  }
  return data;
}

/** Per-slot mean of a metric across every run of one algorithm. */
export function averageSeries(
  runs: MetricsRow[][],
  metric: "avg_latency_ms" | "throughput_mbps" | "drop_rate"
): [number, number][] {
  const sums = new Map<number, { total: number; count: number }>();
  for (const rows of runs) {
    for (const row of rows) {
      const value = row[metric];
      if (value === null) continue;
      const slot = sums.get(row.slot) ?? { total: 0, count: 0 };
      slot.total += value;
      slot.count += 1;
      sums.set(row.slot, slot);
    }
  }
  return [...sums.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([slot, { total, count }]) => [slot, total / count]);
}

/** Rolling mean with the given window, then thinned to at most maxPoints. */
export function smoothAndThin(
  series: [number, number][],
  window: number,
  maxPoints: number
): [number, number][] {
  const smoothed: [number, number][] = [];
  let acc = 0;
  const buffer: number[] = [];
  for (const [slot, value] of series) {
    buffer.push(value);
    acc += value;
    if (buffer.length > window) {
      acc -= buffer.shift()!;
    }
    smoothed.push([slot, acc / buffer.length]);
  }
  if (smoothed.length <= maxPoints) {
    return smoothed;
  }
  const stride = Math.ceil(smoothed.length / maxPoints);
  return smoothed.filter((_, i) => i % stride === 0);
}
