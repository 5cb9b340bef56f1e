import csv
import json

import numpy as np
import pytest

from iabsim.metrics import (
    CSV_COLUMNS,
    Candlestick,
    LatencyAccumulator,
    MetricsError,
    candlestick,
    merge_summaries,
    system_average,
    write_outputs,
)


# ---------------------------------------------------------------- candlestick


def test_candlestick_ten_points():
    c = candlestick(list(range(1, 11)))
    assert c.min == 1 and c.max == 10
    assert c.mean == pytest.approx(5.5)
    assert c.p10 == pytest.approx(1.9)
    assert c.p90 == pytest.approx(9.1)


def test_candlestick_constant():
    c = candlestick([4.2] * 7)
    assert c.min == c.max == c.mean == c.p10 == c.p90 == pytest.approx(4.2)


def test_candlestick_two_samples():
    c = candlestick([0.0, 10.0])
    assert c.p10 == pytest.approx(1.0)
    assert c.p90 == pytest.approx(9.0)


def test_candlestick_empty_rejected():
    with pytest.raises(MetricsError):
        candlestick([])


def test_candlestick_ordering_property():
    rng = np.random.default_rng(2)
    for _ in range(100):
        xs = rng.exponential(3.0, size=rng.integers(1, 50))
        c = candlestick(xs.tolist())
        assert c.min <= c.p10 <= c.p90 <= c.max
        assert c.min <= c.mean <= c.max


# ------------------------------------------------------- latency accumulation


def test_pair_average_single_delivery():
    acc = LatencyAccumulator()
    acc.record(source=0, donor=5, slot=3, latency_ms=5.0)
    assert acc.pair_average()[(0, 5)] == pytest.approx(5.0)


def test_pair_average_mean_over_delivery_slots():
    acc = LatencyAccumulator()
    acc.record(0, 5, slot=1, latency_ms=4.0)
    acc.record(0, 5, slot=2, latency_ms=6.0)
    assert acc.pair_average()[(0, 5)] == pytest.approx(5.0)


def test_pair_average_keeps_slot_maximum():
    acc = LatencyAccumulator()
    acc.record(0, 5, slot=1, latency_ms=4.0)
    acc.record(0, 5, slot=1, latency_ms=9.0)  # same slot, max wins
    acc.record(0, 5, slot=2, latency_ms=1.0)
    assert acc.pair_average()[(0, 5)] == pytest.approx(5.0)


def test_pair_average_empty_pair_excluded():
    acc = LatencyAccumulator()
    acc.record(1, 5, slot=0, latency_ms=2.0)
    averages = acc.pair_average()
    assert (0, 5) not in averages


def test_system_average():
    assert system_average({(0, 5): 4.0, (1, 5): 6.0}) == pytest.approx(5.0)
    assert system_average({(0, 5): 5.0}) == pytest.approx(5.0)
    assert system_average({}) is None


def test_single_pair_system_equals_pair_average():
    acc = LatencyAccumulator()
    acc.record(0, 9, slot=4, latency_ms=7.5)
    averages = acc.pair_average()
    assert system_average(averages) == pytest.approx(averages[(0, 9)])


# ------------------------------------------------------------- write_outputs


def sample_rows():
    return [
        {
            "slot": 0,
            "algo": "safehaul",
            "n_nodes": 2,
            "n_donors": 1,
            "seed": 7,
            "avg_latency_ms": "",
            "throughput_mbps": 0.0,
            "drop_rate": 0.0,
            "conflicts": 0,
            "overrides": 0,
        },
        {
            "slot": 1,
            "algo": "safehaul",
            "n_nodes": 2,
            "n_donors": 1,
            "seed": 7,
            "avg_latency_ms": 1.25,
            "throughput_mbps": 96.0,
            "drop_rate": 0.0,
            "conflicts": 1,
            "overrides": 1,
        },
    ]


def sample_summary():
    return {
        "config": {"slots": 2, "algo": "safehaul"},
        "seed": 7,
        "per_ue": [
            {
                "ue_id": 0,
                "attach": 0,
                "avg_latency_ms": 1.25,
                "throughput_bps": 1e6,
                "drop_rate": 0.0,
                "generated": 10,
                "delivered": 10,
                "dropped": 0,
            }
        ],
        "system": {
            "avg_latency_ms": 1.25,
            "avg_pkt_latency_ms": 1.2,
            "throughput_mbps": 96.0,
            "drop_rate": 0.0,
            "latency_candlestick": candlestick([1.25]).as_dict(),
            "throughput_candlestick": candlestick([1e6]).as_dict(),
            "droprate_candlestick": candlestick([0.0]).as_dict(),
        },
    }


def test_write_outputs_files_and_header(tmp_path):
    out = tmp_path / "run"
    write_outputs(sample_summary(), sample_rows(), out)
    csv_path = out / "metrics.csv"
    with open(csv_path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        assert header == list(CSV_COLUMNS)
        rows = list(reader)
    assert len(rows) == 2
    with open(out / "summary.json") as fh:
        loaded = json.load(fh)
    assert loaded["seed"] == 7
    assert loaded["system"]["latency_candlestick"]["p90"] == 1.25


def test_write_outputs_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    write_outputs(sample_summary(), sample_rows(), a)
    write_outputs(sample_summary(), sample_rows(), b)
    assert (a / "metrics.csv").read_bytes() == (b / "metrics.csv").read_bytes()
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()


def test_write_outputs_unwritable_dir_names_path(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("occupied")
    with pytest.raises(MetricsError, match="blocker"):
        write_outputs(sample_summary(), sample_rows(), blocker / "x")


def test_merge_summaries_pools_ues():
    s1 = sample_summary()
    s2 = sample_summary()
    s2 = json.loads(json.dumps(s2))
    s2["seed"] = 8
    s2["per_ue"][0]["avg_latency_ms"] = 2.75
    merged = merge_summaries([s1, s2])
    assert merged["seeds"] == [7, 8]
    assert merged["runs"] == 2
    assert merged["system"]["latency_candlestick"]["max"] == pytest.approx(2.75)
