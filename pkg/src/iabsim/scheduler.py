"""Round-robin TDMA symbol allocation within one slot.

Active flows split the slot's symbols equally; a flow needing less hands its
excess back, and the surplus is re-dispersed equally among the flows still
waiting.
"""

from __future__ import annotations


def schedule_slot(active_flows, symbols_total):
    """Map each flow to its symbol allocation.

    `active_flows` is a list of (flow key, symbols needed); the total
    allocation never exceeds `symbols_total` and no flow receives more than it
    asked for.
    """
    if symbols_total <= 0:
        raise ValueError("symbols_total must be positive")
    alloc = {f: 0 for f, _ in active_flows}
    need = {f: n for f, n in active_flows}
    pending = [f for f, n in active_flows if n > 0]
    remaining = symbols_total
    while pending and remaining > 0:
        share = remaining // len(pending)
        if share == 0:
            # fewer symbols than flows: one each in flow order
            for f in pending[:remaining]:
                alloc[f] += 1
                need[f] -= 1
            break
        satisfied = []
        for f in pending:
            give = min(share, need[f])
            alloc[f] += give
            need[f] -= give
            remaining -= give
            if need[f] == 0:
                satisfied.append(f)
        if not satisfied:
            # everyone still hungry: hand out the sub-share remainder and stop
            for f in pending[:remaining]:
                alloc[f] += 1
                need[f] -= 1
            break
        pending = [f for f in pending if need[f] > 0]
    return alloc
