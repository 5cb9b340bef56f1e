"""Latency, throughput and drop-rate accounting plus CSV/JSON emission.

Latency follows the pair convention: per (source node, donor) pair and slot,
the maximum latency among that slot's deliveries; pair averages run over the
slots that actually saw a delivery, and the system average is the mean over
populated pairs. Per-packet averages are reported alongside in the summary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CSV_COLUMNS",
    "MetricsError",
    "Candlestick",
    "candlestick",
    "LatencyAccumulator",
    "system_average",
    "write_outputs",
    "merge_summaries",
]

CSV_COLUMNS = (
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
)


class MetricsError(Exception):
    pass


@dataclass(frozen=True)
class Candlestick:
    min: float
    max: float
    mean: float
    p10: float
    p90: float

    def as_dict(self):
        return {"min": self.min, "max": self.max, "mean": self.mean, "p10": self.p10, "p90": self.p90}


def candlestick(samples):
    """Five-number spread summary; percentiles by linear interpolation
    between order statistics so results are reproducible bit for bit."""
    if len(samples) == 0:
        raise MetricsError("candlestick undefined for an empty sample list")
    xs = np.asarray(samples, dtype=float)
    return Candlestick(
        min=float(xs.min()),
        max=float(xs.max()),
        mean=float(xs.mean()),
        p10=float(np.percentile(xs, 10, method="linear")),
        p90=float(np.percentile(xs, 90, method="linear")),
    )


class LatencyAccumulator:
    """Per-pair slot maxima folded into running pair averages."""

    def __init__(self):
        self._sums = {}
        self._slots = {}
        self._open_slot = None
        self._open_max = {}

    def record(self, source, donor, slot, latency_ms):
        if self._open_slot is not None and slot != self._open_slot:
            self._fold()
        self._open_slot = slot
        key = (source, donor)
        prev = self._open_max.get(key)
        if prev is None or latency_ms > prev:
            self._open_max[key] = latency_ms

    def _fold(self):
        for key, value in self._open_max.items():
            self._sums[key] = self._sums.get(key, 0.0) + value
            self._slots[key] = self._slots.get(key, 0) + 1
        self._open_max.clear()
        self._open_slot = None

    def slot_values(self):
        """Pair maxima of the slot currently being recorded."""
        return dict(self._open_max)

    def pair_average(self):
        """Mean of the per-slot maxima over slots with deliveries, per pair."""
        self._fold()
        return {k: self._sums[k] / self._slots[k] for k in self._sums}


def system_average(pair_averages):
    """Mean over populated pairs; None when nothing was delivered."""
    if not pair_averages:
        return None
    return sum(pair_averages.values()) / len(pair_averages)


def _format_cell(value):
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


def write_outputs(summary, rows, out_dir):
    """metrics.csv (per-slot rows, fixed column order) and summary.json."""
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = out_dir / "metrics.csv"
        with open(csv_path, "w", newline="") as fh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            for row in rows:
                fh.write(",".join(_format_cell(row[c]) for c in CSV_COLUMNS) + "\n")
        with open(out_dir / "summary.json", "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise MetricsError(f"cannot write outputs under {out_dir}: {exc}") from exc


def merge_summaries(summaries):
    """Combine per-seed summaries: pooled per-UE statistics and candlesticks
    over every UE of every run."""
    if not summaries:
        raise MetricsError("nothing to merge")
    per_ue = [dict(u, seed=s["seed"]) for s in summaries for u in s["per_ue"]]
    lat = [u["avg_latency_ms"] for u in per_ue if u["avg_latency_ms"] is not None]
    tput = [u["throughput_bps"] for u in per_ue]
    drop = [u["drop_rate"] for u in per_ue]
    merged = {
        "runs": len(summaries),
        "seeds": [s["seed"] for s in summaries],
        "config": summaries[0].get("config", {}),
        "system": {
            "latency_candlestick": candlestick(lat).as_dict() if lat else None,
            "throughput_candlestick": candlestick(tput).as_dict() if tput else None,
            "droprate_candlestick": candlestick(drop).as_dict() if drop else None,
            "avg_latency_ms": _mean_or_none(
                [s["system"]["avg_latency_ms"] for s in summaries]
            ),
            "throughput_mbps": _mean_or_none(
                [s["system"]["throughput_mbps"] for s in summaries]
            ),
            "drop_rate": _mean_or_none([s["system"]["drop_rate"] for s in summaries]),
        },
    }
    return merged


def _mean_or_none(values):
    values = [v for v in values if v is not None]
    if not values:
        return None
    return sum(values) / len(values)
