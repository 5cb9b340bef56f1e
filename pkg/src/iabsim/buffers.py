"""Layer-2 data units and the RLC-like receive/transmit buffers of one node.

Queueing time is tracked incrementally (sums of arrival slots), so per-slot
snapshots are O(1); deadline sweeps are lazy behind a min-deadline watermark.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field


@dataclass(slots=True)
class Packet:
    id: int
    source: int
    ue_id: int
    bap_routing_id: int
    size_bits: int
    created_slot: int
    deadline_slot: int
    hops: list
    arrival_slot: int = 0

    def __post_init__(self):
        if self.deadline_slot <= self.created_slot:
            raise ValueError("packet deadline must lie after its creation slot")
        if not self.hops or self.hops[0] != self.source:
            raise ValueError("packet hop list must start at the source node")


class NodeBuffer:
    """FIFO rx and tx queues sharing one capacity budget."""

    __slots__ = ("owner", "capacity", "rx", "tx", "_arrival_sum", "_min_deadline")

    def __init__(self, owner, capacity):
        self.owner = owner
        self.capacity = math.inf if capacity is None else capacity
        self.rx = deque()
        self.tx = deque()
        self._arrival_sum = 0  # over rx + tx
        self._min_deadline = math.inf

    @property
    def occupancy(self):
        return len(self.rx) + len(self.tx)

    def space(self):
        return self.capacity - self.occupancy

    def push_rx(self, packet, slot):
        """Accept a packet into rx; False when the buffer is full (the caller
        accounts the overflow drop)."""
        if self.occupancy >= self.capacity:
            return False
        packet.arrival_slot = slot
        self.rx.append(packet)
        self._arrival_sum += slot
        if packet.deadline_slot < self._min_deadline:
            self._min_deadline = packet.deadline_slot
        return True

    def drain_rx_to_tx(self):
        """Packets received last slot become forwardable."""
        if self.rx:
            self.tx.extend(self.rx)
            self.rx.clear()

    def queueing_time_ms(self, slot, slot_ms):
        """Mean residence of the queued packets, in milliseconds."""
        n = self.occupancy
        if n == 0:
            return 0.0
        return (slot - self._arrival_sum / n) * slot_ms

    def drop_expired(self, slot):
        """Remove packets whose deadline slot has passed; cheap no-op while
        the watermark says nothing can have expired."""
        if slot <= self._min_deadline:
            return []
        dropped = []
        min_deadline = math.inf
        for queue in (self.rx, self.tx):
            if not queue:
                continue
            kept = deque()
            for p in queue:
                if p.deadline_slot < slot:
                    dropped.append(p)
                    self._arrival_sum -= p.arrival_slot
                else:
                    kept.append(p)
                    if p.deadline_slot < min_deadline:
                        min_deadline = p.deadline_slot
            if queue is self.rx:
                self.rx = kept
            else:
                self.tx = kept
        self._min_deadline = min_deadline
        return dropped

    def transmit_out(self, bit_budget, receiver_space, flow_budgets=None, flow_key=None):
        """Pop FIFO packets from tx within the bit budget (per-flow budgets
        when given) and the receiver's remaining packet space.

        Returns (moved packets, moved bits).
        """
        if not self.tx or receiver_space <= 0 or bit_budget <= 0:
            return [], 0
        moved = []
        kept = deque()
        bits = 0
        space = receiver_space
        queue = self.tx
        if flow_budgets is None:
            # strict FIFO: the first packet that does not fit blocks the line
            while queue:
                p = queue[0]
                if space <= 0 or p.size_bits > bit_budget - bits:
                    break
                queue.popleft()
                moved.append(p)
                bits += p.size_bits
                space -= 1
        else:
            # per-flow FIFO: a flow whose head does not fit is closed for the
            # slot, so later packets of that flow cannot jump the line
            open_flows = sum(1 for b in flow_budgets.values() if b > 0)
            blocked = set()
            for i, p in enumerate(queue):
                if space <= 0 or open_flows <= 0:
                    kept.extend(list(queue)[i:])
                    break
                key = flow_key(p)
                if key in blocked:
                    kept.append(p)
                    continue
                budget = flow_budgets.get(key, 0)
                if p.size_bits <= budget:
                    budget -= p.size_bits
                    flow_budgets[key] = budget
                    if budget <= 0:
                        open_flows -= 1
                        blocked.add(key)
                    moved.append(p)
                    bits += p.size_bits
                    space -= 1
                else:
                    kept.append(p)
                    blocked.add(key)
                    if budget > 0:
                        open_flows -= 1
            if moved:
                self.tx = kept
        if moved:
            for p in moved:
                self._arrival_sum -= p.arrival_slot
        return moved, bits
