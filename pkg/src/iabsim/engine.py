"""The slot engine: per-slot orchestration of blockage, traffic ingress,
proposals, consensus, beam-level physics, transmissions, rewards and metrics.

Phase order within one slot:
  1. blockage step -> feasible edge set
  2. buffers drain rx->tx, UE ingress lands in rx, deadline sweeps
  3. proposals (the stored bandit proposal, or the max-rate pick), gated to
     idle when the link is infeasible or nothing is buffered
  4. consensus resolution -> activations and forced actions
  5. SINR and rate per activated link, interference from the co-active set
  6. transmissions: round-robin symbol split over flows, FIFO moves, drops,
     donor deliveries
  7. rewards for every agent (two-phase: all rewards computed before any
     estimate is updated), then policy steps pick the next proposals
  8. metrics row and invariant checks

Everything is driven by named substreams of the run seed, so equal seeds give
byte-identical outputs.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import channel as ch
from .agent import (
    Action,
    AgentState,
    action_set,
    available_actions,
    estimated_next_hop_latency,
    mlr_policy,
)
from .bandit import LearnerConfig
from .buffers import NodeBuffer, Packet
from .consensus import Proposal, detect_conflicts, priority, resolve
from .metrics import LatencyAccumulator, candlestick, system_average
from .scheduler import schedule_slot
from .topology import generate_topology, load_topology
from .traffic import TrafficModel, TrafficSource, generate_traffic

_PAIR_TAG = 0x5EED
_UE_TAG = 0xDEAF
_BACKLOBE_GAIN = 1e-3  # leakage toward directions outside the serving panel
_RESYNC_EVERY = 1024  # full recount cadence for the conservation check


@dataclass(frozen=True)
class TransmissionRecord:
    link: tuple
    slot: int
    bits_capacity: int
    packets_moved: int
    t_tx_ms: float


@dataclass
class RunResult:
    config: dict
    seed: int
    algo: str
    rows: list
    summary: dict
    violations: list
    action_trace: list
    events: list


def bap_route(packet, node, routing):
    """Static next-hop lookup for table-driven routing tests. Under the
    learning algorithms the slot's activated link designates the receiver, so
    the engine never consults a table. None means the packet stays put."""
    if routing is None:
        return None
    return routing.get((node, packet.bap_routing_id))


def transmit(link, rate_bits, sender, receiver, slot, slot_ms, flow_budgets=None, flow_key=None):
    """Serve one activated link for one slot.

    Expired packets are dropped before anything moves; FIFO packets then flow
    within the bit budget (per-flow budgets when scheduling applies) and the
    receiver's free space (None receiver = donor, unbounded). Returns
    (record, dropped packets, moved packets)."""
    dropped = sender.drop_expired(slot)
    space = receiver.space() if receiver is not None else math.inf
    moved, bits = sender.transmit_out(rate_bits, space, flow_budgets, flow_key)
    t_tx = slot_ms * bits / rate_bits if rate_bits > 0 else 0.0
    record = TransmissionRecord(link, slot, rate_bits, len(moved), t_tx)
    return record, dropped, moved


def build_topology(config):
    if config.topology_path:
        return load_topology(config.topology_path)
    return generate_topology(
        n_nodes=config.n_nodes,
        n_donors=config.n_donors,
        area_m2=config.resolved_area_m2(),
        max_link_range=config.max_link_range_m,
        seed=config.topology_seed,
        height_m=config.node_height_m,
        buffer_capacity=config.buffer_capacity_pkts,
    )


def build_sources(config, topology):
    """UEs placed uniformly over the area, attached to the nearest IAB node;
    placement depends on the topology seed only, so the UE map is stable
    across dynamics seeds."""
    rng = np.random.default_rng(np.random.SeedSequence((config.topology_seed, _UE_TAG)))
    side = math.sqrt(config.resolved_area_m2())
    iab = [n for n in topology.nodes if not n.is_donor]
    sources = []
    for ue in range(config.n_ues):
        x, y = rng.uniform(0.0, side, size=2)
        attach = min(iab, key=lambda n: (n.x_m - x) ** 2 + (n.y_m - y) ** 2).id
        sources.append(
            TrafficSource(ue, attach, config.source_rate_mbps * 1e6, config.arrival_process)
        )
    return sources


def nearest_donor_tags(topology):
    """BAP routing tag per node: the hop-nearest donor (smallest id wins
    ties), via multi-source BFS on reversed edges."""
    reverse = {}
    for u, v in topology.candidate_edges:
        reverse.setdefault(v, []).append(u)
    tag = {d: d for d in sorted(topology.donor_ids)}
    frontier = deque(sorted(topology.donor_ids))
    while frontier:
        v = frontier.popleft()
        for u in sorted(reverse.get(v, ())):
            if u not in tag:
                tag[u] = tag[v]
                frontier.append(u)
    return tag


class LinkPhysics:
    """Per-run frozen channel: per-pair LOS/shadowing draws, per-edge beam
    pairs from the hierarchical search, and lazy interference cross-gains."""

    def __init__(self, topology, config, seed):
        self.topo = topology
        self.cfg = config
        self.seed = seed
        self.array = ch.AntennaArray(config.array_n_h, config.array_n_v)
        half = math.pi / config.n_panels
        self.sector_half = half
        horizon = math.pi / 2
        sector = ch.Sector(
            -half,
            half,
            horizon - config.elevation_halfspan_rad,
            horizon + config.elevation_halfspan_rad,
        )
        sub = (min(2, config.array_n_h), min(2, config.array_n_v))
        self.wide = ch.build_codebook(
            self.array, sector, config.wide_beams_az, config.wide_beams_el, "wide", subarray=sub
        )
        self.narrow = ch.build_codebook(
            self.array, sector, config.narrow_beams_az, config.narrow_beams_el, "narrow"
        )
        self.noise_mw = ch.thermal_noise_mw(config.bandwidth_hz, config.noise_figure_db)
        self.slot_s = config.slot_ms * 1e-3
        self._geo = {}
        self._pair = {}
        self._beam = {}
        self._signal = {}
        self._rate0 = {}
        self._xmw = {}

    def geometry(self, u, v):
        key = (u, v)
        hit = self._geo.get(key)
        if hit is None:
            a, b = self.topo.node(u), self.topo.node(v)
            dx, dy, dz = b.x_m - a.x_m, b.y_m - a.y_m, b.height_m - a.height_m
            d2 = math.hypot(dx, dy)
            dist = math.sqrt(d2 * d2 + dz * dz)
            az = math.atan2(dy, dx)
            el = math.acos(dz / dist) if dist > 0 else math.pi / 2
            hit = self._geo[key] = (az, el, dist, d2)
        return hit

    def pair_channel(self, u, v):
        key = (u, v) if u < v else (v, u)
        hit = self._pair.get(key)
        if hit is None:
            rng = np.random.default_rng(
                np.random.SeedSequence((self.seed, _PAIR_TAG, key[0], key[1]))
            )
            _, _, _, d2 = self.geometry(*key)
            los = bool(rng.random() < ch.los_probability(d2))
            shadow = 0.0
            if self.cfg.shadowing:
                shadow = float(rng.normal(0.0, 4.0 if los else 7.82))
            hit = self._pair[key] = (los, shadow)
        return hit

    def pathloss_db(self, u, v):
        los, shadow = self.pair_channel(u, v)
        _, _, dist, _ = self.geometry(u, v)
        return ch.pathloss(dist, self.cfg.carrier_ghz, los, shadow)

    def beams(self, edge):
        hit = self._beam.get(edge)
        if hit is None:
            u, v = edge
            az_uv, el_uv, _, _ = self.geometry(u, v)
            az_vu, el_vu, _, _ = self.geometry(v, u)
            local_tx = ch.panel_local_azimuth(az_uv, self.cfg.n_panels)
            local_rx = ch.panel_local_azimuth(az_vu, self.cfg.n_panels)
            geom = ch.LinkGeometry(local_tx, el_uv, local_rx, el_vu)
            w_tx, w_rx, gain = ch.hierarchical_beam_search(
                self.array, self.array, geom, self.wide, self.narrow, self.wide, self.narrow
            )
            hit = self._beam[edge] = (
                w_tx.weights,
                w_rx.weights,
                az_uv - local_tx,  # tx panel boresight, global frame
                az_vu - local_rx,  # rx panel boresight
                gain,
            )
        return hit

    def signal_mw(self, edge):
        hit = self._signal.get(edge)
        if hit is None:
            gain = self.beams(edge)[4]
            pl = self.pathloss_db(*edge)
            hit = self._signal[edge] = ch.received_power_mw(
                self.cfg.tx_power_dbm, self.cfg.antenna_gain_db, gain, 1.0, pl
            )
        return hit

    def snr_rate(self, edge):
        """Interference-free rate, used for max-rate ranking and as the slot
        capacity when the link is alone."""
        hit = self._rate0.get(edge)
        if hit is None:
            snr = self.signal_mw(edge) / self.noise_mw
            hit = self._rate0[edge] = ch.link_rate(
                snr, self.cfg.bandwidth_hz, self.slot_s, self.cfg.backhaul_symbol_fraction
            )
        return hit

    def _directed_gain(self, weights, boresight, target_az, target_el):
        delta = math.remainder(target_az - boresight, 2.0 * math.pi)
        if abs(delta) > self.sector_half:
            return _BACKLOBE_GAIN
        return ch.beam_gain(weights, ch.steering_vector(self.array, delta, target_el))

    def interference_mw(self, tx_edge, victim_edge):
        """Power leaking from tx_edge's transmitter into victim_edge's
        receiver, with both ends keeping the beams of their own links."""
        key = (tx_edge, victim_edge)
        hit = self._xmw.get(key)
        if hit is None:
            t = tx_edge[0]
            v = victim_edge[1]
            w_tx, _, bore_tx, _, _ = self.beams(tx_edge)
            _, w_rx, _, bore_rx, _ = self.beams(victim_edge)
            az_tv, el_tv, _, _ = self.geometry(t, v)
            az_vt, el_vt, _, _ = self.geometry(v, t)
            g_t = self._directed_gain(w_tx, bore_tx, az_tv, el_tv)
            g_v = self._directed_gain(w_rx, bore_rx, az_vt, el_vt)
            pl = self.pathloss_db(t, v)
            hit = self._xmw[key] = ch.received_power_mw(
                self.cfg.tx_power_dbm, self.cfg.antenna_gain_db, g_t, g_v, pl
            )
        return hit

    def slot_rate(self, edge, co_active):
        """Rate of an activated link under interference from the other
        concurrently activated links."""
        interference = [
            self.interference_mw(other, edge) for other in co_active if other is not edge
        ]
        sample = ch.sinr(self.signal_mw(edge), interference, self.noise_mw)
        return (
            ch.link_rate(
                sample.value, self.cfg.bandwidth_hz, self.slot_s, self.cfg.backhaul_symbol_fraction
            ),
            sample,
        )


class Simulation:
    """One run: one topology, one algorithm, one seed."""

    def __init__(self, config, seed, topology=None, algo=None):
        self.cfg = config
        self.seed = seed
        self.algo = algo or config.algo
        self.topo = topology if topology is not None else build_topology(config)
        self.slot_ms = config.slot_ms
        self.slot_s = config.slot_ms * 1e-3
        self.t_max_slots = int(config.t_max_ms / config.slot_ms)

        ss = np.random.SeedSequence(seed)
        s_block, s_traffic, s_consensus, s_agents = ss.spawn(4)
        self.rng_block = np.random.default_rng(s_block)
        self.rng_traffic = np.random.default_rng(s_traffic)
        self.rng_consensus = np.random.default_rng(s_consensus)

        self.iab_ids = list(self.topo.iab_node_ids)
        self.edges = sorted(self.topo.candidate_edges)
        self.physics = LinkPhysics(self.topo, config, seed)
        # obstructed (NLOS) links block more often than clear ones
        p_block = [
            config.p_block
            * (1.0 if self.physics.pair_channel(*e)[0] else config.p_block_nlos_factor)
            for e in self.edges
        ]
        self.blockage = ch.MarkovBlockage(self.edges, np.minimum(p_block, 1.0), config.p_recover)
        self.sources = build_sources(config, self.topo)
        self.traffic = TrafficModel(self.sources, config.packet_bits, self.slot_s)
        self.bap_tags = nearest_donor_tags(self.topo)

        self.buffers = {
            n: NodeBuffer(n, self.topo.node(n).buffer_capacity) for n in self.iab_ids
        }
        self.action_sets = {n: action_set(self.topo, n) for n in self.iab_ids}
        eta = 0.0 if self.algo == "risk_neutral" else config.eta
        learner = LearnerConfig(
            alpha=config.alpha,
            eta=eta,
            epsilon0=config.epsilon0,
            epsilon_decay=config.epsilon_decay,
            history_cap=config.history_cap,
        )
        agent_seeds = s_agents.spawn(len(self.iab_ids))
        self.agents = None
        if self.algo in ("safehaul", "risk_neutral"):
            self.agents = {
                n: AgentState(
                    self.action_sets[n],
                    learner,
                    np.random.default_rng(agent_seeds[i]),
                    t_max_ms=config.t_max_ms,
                )
                for i, n in enumerate(self.iab_ids)
            }

        # accounting; the w_* counters cover the post-burn-in window only
        self._next_packet_id = 0
        self.generated = np.zeros(config.n_ues, dtype=np.int64)
        self.delivered = np.zeros(config.n_ues, dtype=np.int64)
        self.dropped = np.zeros(config.n_ues, dtype=np.int64)
        self.latency_sum_ms = np.zeros(config.n_ues)
        self.window_bits = np.zeros(config.n_ues, dtype=np.int64)
        self.w_generated = np.zeros(config.n_ues, dtype=np.int64)
        self.w_delivered = np.zeros(config.n_ues, dtype=np.int64)
        self.w_dropped = np.zeros(config.n_ues, dtype=np.int64)
        self.w_latency_sum_ms = np.zeros(config.n_ues)
        self.burn_in_slot = int(config.slots * config.burn_in_fraction)
        self.latency_acc = LatencyAccumulator()
        self.buffered_total = 0
        self.rows = []
        self.violations = []
        self.action_trace = [] if config.collect_traces else None
        self.events = [] if config.record_events else None

    # ------------------------------------------------------------- helpers

    def _event(self, **kv):
        if self.events is not None:
            self.events.append(kv)

    def _drop(self, packets, slot, cause):
        windowed = slot >= self.burn_in_slot
        for p in packets:
            self.dropped[p.ue_id] += 1
            if windowed:
                self.w_dropped[p.ue_id] += 1
            self._event(slot=slot, type="drop", packet=p.id, cause=cause, node=p.hops[-1])
        self.buffered_total -= len(packets)

    def _deliver(self, packet, donor, slot):
        latency = (slot - packet.created_slot) * self.slot_ms
        if latency > self.cfg.t_max_ms + 1e-9:
            self.violations.append(
                f"slot {slot}: packet {packet.id} delivered past t_max ({latency:.3f} ms)"
            )
        self.delivered[packet.ue_id] += 1
        self.latency_sum_ms[packet.ue_id] += latency
        if slot >= self.burn_in_slot:
            self.window_bits[packet.ue_id] += packet.size_bits
            self.w_delivered[packet.ue_id] += 1
            self.w_latency_sum_ms[packet.ue_id] += latency
        self.latency_acc.record(packet.source, donor, slot, latency)
        self.buffered_total -= 1
        self._event(slot=slot, type="delivery", packet=packet.id, donor=donor, latency_ms=latency)
        return latency

    def _ingress(self, slot):
        packets = generate_traffic(
            self.traffic,
            slot,
            self.rng_traffic,
            self.cfg.packet_bits,
            self.t_max_slots,
            self.bap_tags,
            self._next_packet_id,
        )
        self._next_packet_id += len(packets)
        windowed = slot >= self.burn_in_slot
        for pkt in packets:
            self.generated[pkt.ue_id] += 1
            if windowed:
                self.w_generated[pkt.ue_id] += 1
            if self.buffers[pkt.source].push_rx(pkt, slot):
                self.buffered_total += 1
            else:
                self.dropped[pkt.ue_id] += 1
                if windowed:
                    self.w_dropped[pkt.ue_id] += 1
                self._event(slot=slot, type="drop", packet=pkt.id, cause="overflow", node=pkt.source)

    def _advance(self, slot):
        cfg = self.cfg
        avail_edges = self.blockage.step(self.rng_block)

        for n in self.iab_ids:
            self.buffers[n].drain_rx_to_tx()
        self._ingress(slot)

        tq = {}
        load = {}
        for n in self.iab_ids:
            buf = self.buffers[n]
            if buf.occupancy:
                expired = buf.drop_expired(slot)
                if expired:
                    self._drop(expired, slot, "deadline")
            tq[n] = buf.queueing_time_ms(slot, self.slot_ms)
            load[n] = buf.occupancy

        # proposals, with infeasible/empty transmissions gated to idle
        proposals = []
        gated = {}
        for n in self.iab_ids:
            if self.agents is not None:
                act = self.agents[n].proposal
            else:
                acts = available_actions(self.action_sets[n], avail_edges)
                rates = {a: self.physics.snr_rate(a.edge) for a in acts if a.is_transmit}
                act = mlr_policy(acts, rates, tx_buffer_empty=not self.buffers[n].tx)
            if act.is_transmit and (act.edge not in avail_edges or not self.buffers[n].tx):
                gated[n] = act
                act = Action.idle(n)
            cap = self.topo.node(n).buffer_capacity
            proposals.append(
                Proposal(
                    node=n,
                    action=act,
                    tq_ms=tq[n],
                    load_pkts=load[n],
                    priority=priority(tq[n], load[n], (cfg.t_max_ms, cap), (cfg.w_q, cfg.w_b)),
                )
            )

        conflict_groups = detect_conflicts(proposals)
        resolution = resolve(proposals, self.rng_consensus)
        executed = {}
        for p in proposals:
            executed[p.node] = resolution.overridden.get(p.node, p.action)
        activations = sorted(resolution.activations)

        # half-duplex assertion over the resolved activations
        roles = set()
        for u, v in activations:
            if u in roles or v in roles:
                self.violations.append(f"slot {slot}: half-duplex violated on link ({u}, {v})")
            roles.add(u)
            roles.add(v)

        # physics and transmissions
        t_tx_ms = {}
        slot_delivered_bits = 0
        for edge in activations:
            n, l = edge
            rate, _ = self.physics.slot_rate(edge, activations)
            sender = self.buffers[n]
            budgets = None
            flow_key = None
            if rate > 0 and sender.tx:
                needs = {}
                for p in sender.tx:
                    needs[p.ue_id] = needs.get(p.ue_id, 0) + p.size_bits
                if len(needs) > 1:
                    # round-robin symbol split across the flows sharing the link;
                    # a single flow keeps the whole slot, which the plain FIFO
                    # path already realises
                    bits_per_symbol = rate / cfg.symbols_per_slot
                    flows = [
                        (ue, math.ceil(bits / bits_per_symbol)) for ue, bits in needs.items()
                    ]
                    alloc = schedule_slot(flows, cfg.symbols_per_slot)
                    budgets = {ue: alloc[ue] * bits_per_symbol for ue in alloc}
                    flow_key = _ue_of
            receiver = None if self.topo.is_donor(l) else self.buffers[l]
            record, expired, moved = transmit(
                edge, rate, sender, receiver, slot, self.slot_ms, budgets, flow_key
            )
            if expired:
                self._drop(expired, slot, "deadline")
            t_tx_ms[edge] = record.t_tx_ms
            for p in moved:
                p.hops.append(l)
                if receiver is None:
                    self._deliver(p, l, slot)
                    slot_delivered_bits += p.size_bits
                else:
                    ok = receiver.push_rx(p, slot)
                    if not ok:
                        self.violations.append(
                            f"slot {slot}: receiver {l} overflowed despite refrain rule"
                        )

        # rewards, two-phase so updates never feed this slot's observations
        if self.agents is not None:
            next_hop = {}

            def onward(node):
                est = next_hop.get(node)
                if est is None:
                    if self.topo.is_donor(node):
                        est = 0.0
                    else:
                        est = estimated_next_hop_latency(
                            node,
                            avail_edges,
                            self.agents[node].estimates,
                            donor=False,
                            t_max_ms=cfg.t_max_ms,
                        )
                    next_hop[node] = est
                return est

            updates = []
            for n in self.iab_ids:
                act = executed[n]
                if act.is_transmit:
                    if act.edge not in resolution.activations:
                        self.violations.append(
                            f"slot {slot}: executed transmit {act.edge} without activation"
                        )
                    l = act.b
                    tq_next = 0.0 if self.topo.is_donor(l) else tq[l]
                    reward = tq_next + t_tx_ms.get(act.edge, 0.0) + onward(l)
                else:
                    reward = tq[n] + onward(n)
                updates.append((n, act, reward))
            for n, act, reward in updates:
                acts = available_actions(self.action_sets[n], avail_edges)
                self.agents[n].step(acts, reward, act)

        if self.action_trace is not None:
            self.action_trace.append(tuple(executed[n] for n in self.iab_ids))
        for node, act in resolution.overridden.items():
            self._event(slot=slot, type="override", node=node, forced=act.kind)

        # metrics row
        slot_pairs = self.latency_acc.slot_values()
        avg_latency = (
            sum(slot_pairs.values()) / len(slot_pairs) if slot_pairs else None
        )
        gen_total = int(self.generated.sum())
        drop_total = int(self.dropped.sum())
        self.rows.append(
            {
                "slot": slot,
                "algo": self.algo,
                "n_nodes": len(self.iab_ids),
                "n_donors": len(self.topo.donor_ids),
                "seed": self.seed,
                "avg_latency_ms": avg_latency,
                "throughput_mbps": slot_delivered_bits / self.slot_s / 1e6,
                "drop_rate": drop_total / gen_total if gen_total else 0.0,
                "conflicts": len(conflict_groups),
                "overrides": len(resolution.overridden),
            }
        )

        # conservation identity, incremental plus periodic full recount
        in_flight = gen_total - int(self.delivered.sum()) - drop_total
        if in_flight != self.buffered_total:
            self.violations.append(
                f"slot {slot}: conservation mismatch (in-flight {in_flight} vs tracked {self.buffered_total})"
            )
        if slot % _RESYNC_EVERY == 0:
            actual = sum(self.buffers[n].occupancy for n in self.iab_ids)
            if actual != self.buffered_total:
                self.violations.append(
                    f"slot {slot}: buffered recount mismatch ({actual} vs {self.buffered_total})"
                )
            for n in self.iab_ids:
                if self.buffers[n].occupancy > self.topo.node(n).buffer_capacity:
                    self.violations.append(f"slot {slot}: node {n} exceeds buffer capacity")

    # ----------------------------------------------------------------- run

    def run(self):
        for slot in range(self.cfg.slots):
            self._advance(slot)
        # closing audit: tracked in-flight count vs actual buffer contents
        actual = sum(self.buffers[n].occupancy for n in self.iab_ids)
        if actual != self.buffered_total:
            self.violations.append(
                f"end of run: buffered recount mismatch ({actual} vs {self.buffered_total})"
            )
        for n in self.iab_ids:
            if self.buffers[n].occupancy > self.topo.node(n).buffer_capacity:
                self.violations.append(f"end of run: node {n} exceeds buffer capacity")
        return self._finalize()

    def _finalize(self):
        cfg = self.cfg
        window_slots = cfg.slots - self.burn_in_slot
        window_s = max(window_slots, 1) * self.slot_s
        per_ue = []
        for src in self.sources:
            ue = src.ue_id
            w_del = int(self.w_delivered[ue])
            w_gen = int(self.w_generated[ue])
            per_ue.append(
                {
                    "ue_id": ue,
                    "attach": src.attach,
                    # per-UE series cover the post-burn-in window, so the
                    # candlesticks describe converged behaviour
                    "avg_latency_ms": self.w_latency_sum_ms[ue] / w_del if w_del else None,
                    "throughput_bps": float(self.window_bits[ue]) / window_s,
                    "drop_rate": int(self.w_dropped[ue]) / w_gen if w_gen else 0.0,
                    "generated": int(self.generated[ue]),
                    "delivered": int(self.delivered[ue]),
                    "dropped": int(self.dropped[ue]),
                }
            )
        pair_avgs = self.latency_acc.pair_average()
        lat_values = [u["avg_latency_ms"] for u in per_ue if u["avg_latency_ms"] is not None]
        tput_values = [u["throughput_bps"] for u in per_ue]
        drop_values = [u["drop_rate"] for u in per_ue]
        delivered_total = int(self.delivered.sum())
        system = {
            "avg_latency_ms": system_average(pair_avgs),
            "avg_pkt_latency_ms": (
                float(self.latency_sum_ms.sum()) / delivered_total if delivered_total else None
            ),
            "throughput_mbps": float(self.window_bits.sum()) / window_s / 1e6,
            "drop_rate": (
                int(self.dropped.sum()) / int(self.generated.sum()) if self.generated.sum() else 0.0
            ),
            "latency_candlestick": candlestick(lat_values).as_dict() if lat_values else None,
            "throughput_candlestick": candlestick(tput_values).as_dict() if tput_values else None,
            "droprate_candlestick": candlestick(drop_values).as_dict() if drop_values else None,
            "generated": int(self.generated.sum()),
            "delivered": delivered_total,
            "dropped": int(self.dropped.sum()),
            "invariant_violations": len(self.violations),
        }
        config_echo = cfg.to_dict()
        config_echo["algo"] = self.algo
        summary = {
            "config": config_echo,
            "seed": self.seed,
            "per_ue": per_ue,
            "system": system,
        }
        return RunResult(
            config=config_echo,
            seed=self.seed,
            algo=self.algo,
            rows=self.rows,
            summary=summary,
            violations=self.violations,
            action_trace=self.action_trace,
            events=self.events,
        )


def _ue_of(packet):
    return packet.ue_id


def run_simulation(config, seed, topology=None, algo=None):
    """Build and run one simulation; returns its RunResult."""
    return Simulation(config, seed, topology=topology, algo=algo).run()
