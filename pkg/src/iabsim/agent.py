"""Per-node decision logic: the action space over backhaul links, reward
shaping from queueing/transmission times plus the next hop's latency
estimate, the risk-averse bandit policy step, and the greedy max-rate
baseline.

The risk-neutral baseline is this same agent with eta = 0; both share every
code path so that equal seeds give identical trajectories.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .bandit import LinkEstimate, epsilon_greedy

__all__ = [
    "Action",
    "ActionSet",
    "AgentState",
    "action_set",
    "available_actions",
    "estimated_next_hop_latency",
    "compute_reward",
    "mlr_policy",
]

TRANSMIT = "transmit"
RECEIVE = "receive"
IDLE = "idle"


@dataclass(frozen=True, order=True)
class Action:
    """One arm of a node's bandit: activate an outgoing link, accept an
    incoming one, or stay idle (the self-pair)."""

    kind: str
    a: int  # transmitting endpoint (== owner for idle)
    b: int  # receiving endpoint

    def __post_init__(self):
        # actions live in per-slot dict lookups; precompute the hot parts
        object.__setattr__(self, "edge", (self.a, self.b))
        object.__setattr__(self, "_hash", hash((self.kind, self.a, self.b)))

    def __hash__(self):
        return self._hash

    @classmethod
    def transmit(cls, owner, peer):
        return cls(TRANSMIT, owner, peer)

    @classmethod
    def receive(cls, peer, owner):
        return cls(RECEIVE, peer, owner)

    @classmethod
    def idle(cls, owner):
        return cls(IDLE, owner, owner)

    @property
    def is_transmit(self):
        return self.kind == TRANSMIT

    @property
    def is_receive(self):
        return self.kind == RECEIVE

    @property
    def is_idle(self):
        return self.kind == IDLE


@dataclass(frozen=True)
class ActionSet:
    """All arms a node may ever play, in canonical order."""

    owner: int
    actions: tuple


def action_set(topology, node):
    """Transmit arms for every candidate out-edge, receive arms for every
    candidate in-edge from another IAB node, plus idle."""
    if topology.is_donor(node):
        raise ValueError(f"node {node} is a donor; donors do not run agents")
    acts = [Action.idle(node)]
    for u, v in topology.candidate_edges:
        if u == node:
            acts.append(Action.transmit(node, v))
        elif v == node and not topology.is_donor(u):
            acts.append(Action.receive(u, node))
    return ActionSet(owner=node, actions=tuple(sorted(acts)))


def available_actions(aset, edge_set):
    """Arms whose underlying edge is feasible this slot; idle always is."""
    edges = edge_set.edges if hasattr(edge_set, "edges") else edge_set
    return [a for a in aset.actions if a.is_idle or a.edge in edges]


def estimated_next_hop_latency(node, edges, estimates, donor, t_max_ms):
    """The node's own cheapest way onward: min of its transmit-arm latency
    means over the currently feasible out-links.

    Donors terminate paths (0). A node with no feasible out-link reports the
    t_max penalty, and the estimate is clamped at t_max so that rewards stay
    bounded.
    """
    if donor:
        return 0.0
    edges = edges.edges if hasattr(edges, "edges") else edges
    best = t_max_ms
    for act, est in estimates.items():
        if act.kind == TRANSMIT and est.pulls > 0 and act.edge in edges:
            if est.mean_latency < best:
                best = est.mean_latency
    return best


def compute_reward(action, tq_self_ms, tq_next_ms, t_tx_ms, next_hop_est_ms):
    """Observed cost of the performed arm.

    Transmit: receiver queueing time + transmission time + the receiver's
    onward estimate. Receive and idle: own queueing time + own onward
    estimate.
    """
    if action.kind == TRANSMIT:
        return tq_next_ms + t_tx_ms + next_hop_est_ms
    return tq_self_ms + next_hop_est_ms


class AgentState:
    """Bandit state of one IAB node: per-arm estimates, exploration rate and
    the pending proposal for the next slot.

    The first proposal is always idle (nothing is buffered before slot 1);
    after that, arms never pulled are forced once before epsilon-greedy takes
    over.
    """

    def __init__(self, aset, config, rng, t_max_ms, q_init=0.0):
        self.owner = aset.owner
        self.actions = aset.actions
        self.config = config
        self.rng = rng
        self.t_max_ms = t_max_ms
        self.estimates = {a: LinkEstimate(q=q_init) for a in self.actions}
        self.epsilon = config.epsilon0
        self.proposal = Action.idle(self.owner)
        self._forced = deque(a for a in self.actions)

    def step(self, available, observed_reward, performed):
        """Fold the reward of the performed arm in, decay epsilon, and pick
        the next proposal from the currently available arms."""
        self.estimates[performed].observe(observed_reward, self.config, self.rng)
        self.epsilon *= self.config.epsilon_decay
        while self._forced and self.estimates[self._forced[0]].pulls > 0:
            self._forced.popleft()
        nxt = None
        if self._forced:
            pulled = self.estimates
            nxt = next((a for a in self._forced if pulled[a].pulls == 0 and a in available), None)
        if nxt is None:
            q_by_arm = {a: self.estimates[a].q for a in available}
            nxt = epsilon_greedy(q_by_arm, available, self.epsilon, self.rng)
        self.proposal = nxt
        return nxt


def mlr_policy(available, rates, tx_buffer_empty):
    """Greedy max-link-rate baseline: the feasible transmit arm with the
    highest instantaneous rate; idle when nothing can be sent."""
    if not available:
        raise ValueError("no available actions")
    idle = next(a for a in available if a.is_idle)
    if tx_buffer_empty:
        return idle
    transmits = [a for a in available if a.is_transmit]
    if not transmits:
        return idle
    return max(sorted(transmits), key=lambda a: rates.get(a, 0))
