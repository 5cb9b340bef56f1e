/** Input schemas of the simulator outputs and their validation. */

export const CSV_COLUMNS = [
  "slot",
  "algo",
  "n_nodes",
  "n_donors",
  "seed",
  "avg_latency_ms",
  "throughput_mbps",
  "drop_rate",
  "conflicts",
  "overrides",
] as const;

export interface MetricsRow {
  slot: number;
  algo: string;
  n_nodes: number;
  n_donors: number;
  seed: number;
  avg_latency_ms: number | null; // empty cell when a slot saw no delivery
  throughput_mbps: number;
  drop_rate: number;
  conflicts: number;
  overrides: number;
}

export interface Candle {
  min: number;
  max: number;
  mean: number;
  p10: number;
  p90: number;
}

export interface SystemStats {
  avg_latency_ms: number | null;
  avg_pkt_latency_ms: number | null;
  throughput_mbps: number;
  drop_rate: number;
  latency_candlestick: Candle | null;
  throughput_candlestick: Candle | null;
  droprate_candlestick: Candle | null;
}

export interface Summary {
  config: { algo: string; n_nodes: number; n_donors: number; alpha: number } & Record<
    string,
    unknown
  >;
  seed: number;
  per_ue: unknown[];
  system: SystemStats;
}

/** Merged multi-seed aggregate written next to the per-run directories. */
export interface MergedSummary {
  runs: number;
  seeds: number[];
  config: { algo: string; n_nodes: number; n_donors: number; alpha: number } & Record<
    string,
    unknown
  >;
  system: {
    avg_latency_ms: number | null;
    throughput_mbps: number | null;
    drop_rate: number | null;
    latency_candlestick: Candle | null;
    throughput_candlestick: Candle | null;
    droprate_candlestick: Candle | null;
  };
}

export class SchemaError extends Error {}

const NUMERIC: ReadonlySet<string> = new Set([
  "slot",
  "n_nodes",
  "n_donors",
  "seed",
  "throughput_mbps",
  "drop_rate",
  "conflicts",
  "overrides",
]);

export function parseMetricsCsv(text: string, source: string): MetricsRow[] {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${source}: empty metrics file`);
  }
  const header = lines[0].split(",");
  for (const column of CSV_COLUMNS) {
    if (!header.includes(column)) {
      throw new SchemaError(`${source}: missing column "${column}"`);
    }
  }
  if (lines.length === 1) {
    throw new SchemaError(`${source}: no data rows`);
  }
  const index = new Map(header.map((name, i) => [name, i]));
  const rows: MetricsRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    const cell = (name: string) => cells[index.get(name)!];
    const latencyRaw = cell("avg_latency_ms");
    const row: MetricsRow = {
      slot: Number(cell("slot")),
      algo: cell("algo"),
      n_nodes: Number(cell("n_nodes")),
      n_donors: Number(cell("n_donors")),
      seed: Number(cell("seed")),
      avg_latency_ms: latencyRaw === "" ? null : Number(latencyRaw),
      throughput_mbps: Number(cell("throughput_mbps")),
      drop_rate: Number(cell("drop_rate")),
      conflicts: Number(cell("conflicts")),
      overrides: Number(cell("overrides")),
    };
    for (const name of NUMERIC) {
      if (Number.isNaN((row as unknown as Record<string, number>)[name])) {
        throw new SchemaError(`${source}: row ${i} has a non-numeric "${name}"`);
      }
    }
    rows.push(row);
  }
  return rows;
}

function requireKeys(obj: Record<string, unknown>, keys: string[], source: string): void {
  for (const key of keys) {
    if (!(key in obj)) {
      throw new SchemaError(`${source}: missing field "${key}"`);
    }
  }
}

export function parseSummary(jsonText: string, source: string): Summary {
  let doc: Record<string, unknown>;
  try {
    doc = JSON.parse(jsonText);
  } catch (err) {
    throw new SchemaError(`${source}: not valid JSON (${(err as Error).message})`);
  }
  requireKeys(doc, ["config", "seed", "per_ue", "system"], source);
  const system = doc.system as Record<string, unknown>;
  requireKeys(
    system,
    ["avg_latency_ms", "throughput_mbps", "drop_rate", "latency_candlestick"],
    `${source} (system)`
  );
  return doc as unknown as Summary;
}

export function parseMergedSummary(jsonText: string, source: string): MergedSummary {
  let doc: Record<string, unknown>;
  try {
    doc = JSON.parse(jsonText);
  } catch (err) {
    throw new SchemaError(`${source}: not valid JSON (${(err as Error).message})`);
  }
  requireKeys(doc, ["runs", "seeds", "config", "system"], source);
  return doc as unknown as MergedSummary;
}
