"""Run configuration: every tunable of the simulator in one flat record,
exhaustive validation, JSON round-tripping and the four scenario presets.

Desk-scale presets keep the full deployment's node density (one site per
~66,000 m^2) while shrinking the node count; the full-scale configuration is
available as the named preset "full".
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

ALGOS = ("safehaul", "risk_neutral", "mlr")
ARRIVALS = ("cbr", "poisson")

AREA_PER_NODE_M2 = 15e6 / 223  # Table-scale deployment density


@dataclass
class RunConfig:
    # deployment
    n_nodes: int = 25
    n_donors: int = 3
    area_m2: float = None  # None: density-preserving from n_nodes
    max_link_range_m: float = 300.0
    node_height_m: float = 15.0
    buffer_capacity_pkts: int = 512
    topology_seed: int = 12345
    topology_path: str = None  # load instead of generating

    # channel / phy
    carrier_ghz: float = 28.0
    bandwidth_hz: float = 400e6
    noise_figure_db: float = 10.0
    tx_power_dbm: float = 30.0
    antenna_gain_db: float = 33.0
    array_n_h: int = 8
    array_n_v: int = 8
    n_panels: int = 3
    wide_beams_az: int = 4
    wide_beams_el: int = 2
    narrow_beams_az: int = 16
    narrow_beams_el: int = 4
    elevation_halfspan_rad: float = 0.35
    shadowing: bool = True
    p_block: float = 0.01
    p_recover: float = 0.2
    p_block_nlos_factor: float = 4.0

    # learner
    alpha: float = 0.1
    eta: float = 1.0
    epsilon0: float = 0.1
    epsilon_decay: float = 0.9995
    history_cap: int = 100_000

    # mac / timing
    slot_ms: float = 0.125
    symbols_per_slot: int = 14
    backhaul_symbol_fraction: float = 1.0
    packet_bits: int = 12000
    t_max_ms: float = 30.0

    # traffic
    n_ues: int = 100
    source_rate_mbps: float = 80.0
    arrival_process: str = "poisson"

    # consensus
    w_q: float = 0.5
    w_b: float = 0.5

    # run control
    algo: str = "safehaul"
    slots: int = 10_000
    seeds: tuple = tuple(range(20))
    burn_in_fraction: float = 0.5
    collect_traces: bool = False
    record_events: bool = False

    def resolved_area_m2(self):
        if self.area_m2 is not None:
            return self.area_m2
        return AREA_PER_NODE_M2 * self.n_nodes

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["seeds"] = list(self.seeds)
        return d

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError([f"unknown config key: {k}" for k in unknown])
        kwargs = dict(data)
        if "seeds" in kwargs:
            kwargs["seeds"] = tuple(kwargs["seeds"])
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError([f"cannot read config {path}: {exc}"]) from exc
        return cls.from_dict(data)


class ConfigError(Exception):
    """Carries the full violation list."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


def validate(config):
    """Every violated constraint, as human-readable strings; empty means ok."""
    v = []
    c = config

    def check(ok, msg):
        if not ok:
            v.append(msg)

    check(c.n_nodes >= 1, f"n_nodes must be >= 1, got {c.n_nodes}")
    check(c.n_donors >= 1, f"n_donors must be >= 1, got {c.n_donors}")
    check(c.area_m2 is None or c.area_m2 > 0, f"area_m2 must be positive, got {c.area_m2}")
    check(c.max_link_range_m > 0, f"max_link_range_m must be positive, got {c.max_link_range_m}")
    check(c.node_height_m > 0, f"node_height_m must be positive, got {c.node_height_m}")
    check(
        c.buffer_capacity_pkts > 0,
        f"buffer_capacity_pkts must be positive, got {c.buffer_capacity_pkts}",
    )
    check(c.carrier_ghz > 0, f"carrier_ghz must be positive, got {c.carrier_ghz}")
    check(c.bandwidth_hz > 0, f"bandwidth_hz must be positive, got {c.bandwidth_hz}")
    check(c.array_n_h >= 1 and c.array_n_v >= 1, "antenna array needs >= 1 element per axis")
    check(c.n_panels >= 1, f"n_panels must be >= 1, got {c.n_panels}")
    check(
        c.wide_beams_az * c.wide_beams_el >= 1 and c.narrow_beams_az * c.narrow_beams_el >= 1,
        "codebooks need at least one beam",
    )
    check(
        c.wide_beams_az * c.wide_beams_el < c.narrow_beams_az * c.narrow_beams_el,
        "wide codebook must be smaller than the narrow one",
    )
    check(0.0 <= c.p_block <= 1.0, f"p_block must be in [0, 1], got {c.p_block}")
    check(0.0 <= c.p_recover <= 1.0, f"p_recover must be in [0, 1], got {c.p_recover}")
    check(
        c.p_block_nlos_factor >= 0.0,
        f"p_block_nlos_factor must be >= 0, got {c.p_block_nlos_factor}",
    )
    check(0.0 < c.alpha <= 1.0, f"alpha must be in (0, 1], got {c.alpha}")
    check(0.0 <= c.eta <= 1.0, f"eta must be in [0, 1], got {c.eta}")
    check(0.0 <= c.epsilon0 <= 1.0, f"epsilon0 must be in [0, 1], got {c.epsilon0}")
    check(0.0 < c.epsilon_decay <= 1.0, f"epsilon_decay must be in (0, 1], got {c.epsilon_decay}")
    check(c.history_cap >= 1, f"history_cap must be >= 1, got {c.history_cap}")
    check(c.slot_ms > 0, f"slot_ms must be positive, got {c.slot_ms}")
    check(c.symbols_per_slot >= 1, f"symbols_per_slot must be >= 1, got {c.symbols_per_slot}")
    check(
        0.0 < c.backhaul_symbol_fraction <= 1.0,
        f"backhaul_symbol_fraction must be in (0, 1], got {c.backhaul_symbol_fraction}",
    )
    check(c.packet_bits > 0, f"packet_bits must be positive, got {c.packet_bits}")
    check(c.t_max_ms > c.slot_ms, f"t_max_ms must exceed one slot, got {c.t_max_ms}")
    check(c.n_ues >= 0, f"n_ues must be >= 0, got {c.n_ues}")
    check(c.source_rate_mbps >= 0, f"source_rate_mbps must be >= 0, got {c.source_rate_mbps}")
    check(
        c.arrival_process in ARRIVALS,
        f"arrival_process must be one of {ARRIVALS}, got {c.arrival_process!r}",
    )
    check(c.w_q >= 0 and c.w_b >= 0 and c.w_q + c.w_b > 0, "priority weights must be non-negative and not both zero")
    check(c.algo in ALGOS, f"algo must be one of {ALGOS}, got {c.algo!r}")
    check(c.slots >= 1, f"slots must be >= 1, got {c.slots}")
    check(len(c.seeds) >= 1, "seeds must be non-empty")
    check(
        0.0 <= c.burn_in_fraction < 1.0,
        f"burn_in_fraction must be in [0, 1), got {c.burn_in_fraction}",
    )
    return v


def validate_file(path):
    """Validation report for a config file without running anything."""
    try:
        config = RunConfig.from_file(path)
    except ConfigError as exc:
        return exc.violations
    return validate(config)


# --------------------------------------------------------------------
# scenario presets: per-scenario base overrides and the swept axis


def scenario_runs(scenario, base=None):
    """Expand a scenario preset into (label, config overrides, algos) runs.

    1: convergence over time, all three algorithms at full load.
    2: network-size sweep under proportional UE load.
    3: donor-count sweep (learning algorithm only).
    4: risk-level sweep with eta = 1.
    """
    base = dict(base or {})
    if scenario == 1:
        over = dict(base, n_ues=100, source_rate_mbps=80.0)
        return [("s1", over, ["safehaul", "risk_neutral", "mlr"])]
    if scenario == 2:
        runs = []
        for n in (15, 25, 40):
            over = dict(base, n_nodes=n, n_ues=2 * n, source_rate_mbps=40.0)
            runs.append((f"N{n}", over, ["safehaul", "risk_neutral", "mlr"]))
        return runs
    if scenario == 3:
        runs = []
        for d in (1, 2, 3, 5):
            over = dict(base, n_donors=d, n_ues=100, source_rate_mbps=40.0)
            runs.append((f"D{d}", over, ["safehaul"]))
        return runs
    if scenario == 4:
        runs = []
        for alpha in (0.1, 0.3, 0.5, 0.7, 1.0):
            over = dict(base, alpha=alpha, eta=1.0, n_ues=100, source_rate_mbps=20.0)
            runs.append((f"alpha{alpha}", over, ["safehaul"]))
        return runs
    if scenario == "full":
        over = dict(
            base,
            n_nodes=223,
            n_donors=3,
            area_m2=15e6,
            max_link_range_m=500.0,
            n_ues=100,
            source_rate_mbps=80.0,
        )
        return [("full", over, ["safehaul", "risk_neutral", "mlr"])]
    raise ValueError(f"unknown scenario {scenario!r}")
