"""Donor-side conflict resolution.

Every IAB node shares only its next action, queueing time and buffer load.
Transmissions that cannot co-exist under half-duplex (shared receiver, or a
target that wants to transmit itself) are resolved by the weighted
queue/load priority; losers are forced to idle, captured receivers are forced
to receive from the winner.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .agent import Action

__all__ = [
    "Proposal",
    "Resolution",
    "priority",
    "detect_conflicts",
    "resolve",
    "proposal_record",
]

DEFAULT_NORMS = (30.0, 512)  # (t_max_ms, buffer capacity)
DEFAULT_WEIGHTS = (0.5, 0.5)  # (w_q, w_B)


def priority(tq_ms, load_pkts, norms, weights):
    """Saturating weighted sum of normalised queueing time and load."""
    tq_max, b_max = norms
    if tq_max <= 0 or b_max <= 0:
        raise ValueError("priority norms must be positive")
    w_q, w_b = weights
    return w_q * min(tq_ms / tq_max, 1.0) + w_b * min(load_pkts / b_max, 1.0)


@dataclass(frozen=True)
class Proposal:
    """One node's shared state for the slot: action plus the two scalars the
    priority is built from."""

    node: int
    action: Action
    tq_ms: float
    load_pkts: int
    priority: float = field(default=None)

    def __post_init__(self):
        if self.priority is None:
            object.__setattr__(
                self, "priority", priority(self.tq_ms, self.load_pkts, DEFAULT_NORMS, DEFAULT_WEIGHTS)
            )


@dataclass(frozen=True)
class Resolution:
    """Consistent activation set plus the actions forced onto losers."""

    activations: frozenset
    overridden: dict


def _by_node(proposals):
    by_node = {}
    for p in proposals:
        if p.node in by_node:
            raise ValueError(f"duplicate proposal from node {p.node}")
        by_node[p.node] = p
    return by_node


def detect_conflicts(proposals):
    """Groups of transmit proposals that cannot co-activate.

    One group per contested node: the transmissions targeting it plus its own
    transmission, whenever at least two of those exist.
    """
    _by_node(proposals)
    tx = [p for p in proposals if p.action.is_transmit]
    incoming = {}
    own_tx = {}
    for p in tx:
        incoming.setdefault(p.action.b, []).append(p)
        own_tx[p.node] = p
    groups = []
    seen = set()
    for contested in sorted(set(incoming) | set(own_tx)):
        group = list(incoming.get(contested, []))
        if contested in own_tx and own_tx[contested] not in group:
            group.append(own_tx[contested])
        if len(group) < 2:
            continue
        key = frozenset(p.node for p in group)
        if key not in seen:
            seen.add(key)
            groups.append(sorted(group, key=lambda p: p.node))
    return groups


def resolve(proposals, rng, weights=None, norms=None):
    """Greedy priority resolution of the slot's proposals.

    Transmissions are admitted in descending priority order (ties broken by a
    seeded uniform draw) while both endpoints are still free. A losing
    transmitter idles; a free target that proposed anything other than
    receiving from the winner is forced to receive.
    """
    by_node = _by_node(proposals)
    tx = [p for p in proposals if p.action.is_transmit]

    def pri(p):
        if weights is None:
            return p.priority
        return priority(p.tq_ms, p.load_pkts, norms or DEFAULT_NORMS, weights)

    tx_sorted = sorted(tx, key=lambda p: p.node)
    tiebreak = rng.random(len(tx_sorted)) if len(tx_sorted) else []
    order = sorted(
        range(len(tx_sorted)), key=lambda i: (-pri(tx_sorted[i]), tiebreak[i])
    )

    assigned = {}
    activations = set()
    overridden = {}
    for i in order:
        p = tx_sorted[i]
        n, l = p.action.edge
        if assigned.get(n) == "rx":
            continue  # forced receive already recorded when the winner landed
        if l in assigned or n in assigned:
            overridden[n] = Action.idle(n)
            continue
        activations.add((n, l))
        assigned[n] = "tx"
        assigned[l] = "rx"
        target = by_node.get(l)
        if target is not None and target.action != Action.receive(n, l):
            overridden[l] = Action.receive(n, l)
    return Resolution(activations=frozenset(activations), overridden=overridden)


def proposal_record(proposal):
    """Wire form of a proposal for trace logs; deliberately tiny so no
    estimate tables ever leave a node."""
    return {
        "node": proposal.node,
        "action": {
            "kind": proposal.action.kind,
            "from": proposal.action.a,
            "to": proposal.action.b,
        },
        "tq_ms": proposal.tq_ms,
        "load_pkts": proposal.load_pkts,
    }
