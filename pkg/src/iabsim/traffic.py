"""UE ingress traffic: per-source packet counts per slot, either exact-rate
CBR with fractional carryover or Poisson arrivals, and the packets they
become."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .buffers import Packet

CBR = "cbr"
POISSON = "poisson"


@dataclass(frozen=True)
class TrafficSource:
    ue_id: int
    attach: int
    rate_bps: float
    process: str = POISSON

    def __post_init__(self):
        if self.rate_bps < 0:
            raise ValueError("source rate must be non-negative")
        if self.process not in (CBR, POISSON):
            raise ValueError(f"unknown arrival process {self.process!r}")


class TrafficModel:
    """Vectorised arrival counts for a fixed set of sources."""

    def __init__(self, sources, packet_bits, slot_s):
        self.sources = list(sources)
        lam = np.array([s.rate_bps * slot_s / packet_bits for s in self.sources])
        self._lam = lam
        self._is_poisson = np.array([s.process == POISSON for s in self.sources])
        self._carry = np.zeros(len(self.sources))

    def counts(self, rng):
        """Packets arriving this slot, one entry per source; the Poisson draw
        happens every slot with a fixed shape so streams stay reproducible."""
        n = len(self.sources)
        out = np.zeros(n, dtype=np.int64)
        if n == 0:
            return out
        if self._is_poisson.any():
            draws = rng.poisson(self._lam[self._is_poisson])
            out[self._is_poisson] = draws
        cbr = ~self._is_poisson
        if cbr.any():
            self._carry[cbr] += self._lam[cbr]
            whole = np.floor(self._carry[cbr])
            self._carry[cbr] -= whole
            out[cbr] = whole.astype(np.int64)
        return out


def generate_traffic(model, slot, rng, packet_bits, t_max_slots, routing_tags, next_id):
    """This slot's fresh packets across all sources, stamped with creation
    slot, deadline and the BAP routing tag of their attach node. Ids count up
    from `next_id`."""
    counts = model.counts(rng)
    packets = []
    pid = next_id
    for idx in np.nonzero(counts)[0]:
        src = model.sources[idx]
        tag = routing_tags.get(src.attach, -1)
        for _ in range(int(counts[idx])):
            packets.append(
                Packet(
                    id=pid,
                    source=src.attach,
                    ue_id=src.ue_id,
                    bap_routing_id=tag,
                    size_bits=packet_bits,
                    created_slot=slot,
                    deadline_slot=slot + t_max_slots,
                    hops=[src.attach],
                )
            )
            pid += 1
    return packets
