"""Deployment graph: nodes, donors, candidate link edges, synthetic topology
generation and JSON file I/O.

Candidate edges are directed pairs within the maximum link range (both
directions are listed). Donor-originated edges exist in the graph but carry no
backhaul traffic in the uplink-only model; the agent layer never activates
them.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Node",
    "Topology",
    "EdgeSet",
    "TopologyError",
    "generate_topology",
    "load_topology",
    "save_topology",
    "available_edges",
    "donors_reach_all_nodes",
]

KIND_NODE = "iab_node"
KIND_DONOR = "iab_donor"

_JSON_KIND = {KIND_NODE: "node", KIND_DONOR: "donor"}
_KIND_FROM_JSON = {v: k for k, v in _JSON_KIND.items()}


class TopologyError(Exception):
    """Raised when a topology file cannot be parsed or an invariant fails."""


@dataclass(frozen=True)
class Node:
    id: int
    x_m: float
    y_m: float
    height_m: float
    kind: str
    buffer_capacity: int

    @property
    def is_donor(self):
        return self.kind == KIND_DONOR


@dataclass(frozen=True)
class Topology:
    nodes: tuple
    donor_ids: frozenset
    candidate_edges: frozenset
    max_link_range_m: float

    @property
    def iab_node_ids(self):
        return tuple(n.id for n in self.nodes if not n.is_donor)

    def node(self, node_id):
        return self.nodes[node_id]

    def is_donor(self, node_id):
        return node_id in self.donor_ids

    def out_neighbors(self, node_id):
        return sorted(v for (u, v) in self.candidate_edges if u == node_id)

    def in_neighbors(self, node_id):
        return sorted(u for (u, v) in self.candidate_edges if v == node_id)

    def distance_3d(self, u, v):
        a, b = self.nodes[u], self.nodes[v]
        return math.sqrt(
            (a.x_m - b.x_m) ** 2 + (a.y_m - b.y_m) ** 2 + (a.height_m - b.height_m) ** 2
        )


@dataclass(frozen=True)
class EdgeSet:
    """Feasible directed links of one slot."""

    slot: int
    edges: frozenset


def _candidate_edges(nodes, max_link_range):
    xyz = np.array([[n.x_m, n.y_m, n.height_m] for n in nodes])
    diff = xyz[:, None, :] - xyz[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    within = dist <= max_link_range
    np.fill_diagonal(within, False)
    us, vs = np.nonzero(within)
    return frozenset(zip(us.tolist(), vs.tolist()))


def donors_reach_all_nodes(topology):
    """True when every IAB node has a directed path to at least one donor."""
    reverse = {}
    for u, v in topology.candidate_edges:
        reverse.setdefault(v, []).append(u)
    seen = set(topology.donor_ids)
    frontier = deque(seen)
    while frontier:
        v = frontier.popleft()
        for u in reverse.get(v, ()):
            if u not in seen:
                seen.add(u)
                frontier.append(u)
    return all(n.id in seen for n in topology.nodes)


def _validate(topology):
    ids = [n.id for n in topology.nodes]
    if ids != list(range(len(ids))):
        raise TopologyError("invariant failed: node ids must be dense in [0, N+D)")
    if not topology.donor_ids:
        raise TopologyError("invariant failed: at least one donor is required")
    for n in topology.nodes:
        if n.height_m <= 0:
            raise TopologyError(f"invariant failed: node {n.id} height must be positive")
        if not n.is_donor and n.buffer_capacity <= 0:
            raise TopologyError(f"invariant failed: node {n.id} buffer capacity must be positive")
    for u, v in topology.candidate_edges:
        if u == v:
            raise TopologyError("invariant failed: candidate edges must not contain self-loops")
    if not donors_reach_all_nodes(topology):
        raise TopologyError("invariant failed: some IAB node cannot reach any donor")
    return topology


def _donor_positions(n_donors, side):
    """Evenly spaced donor sites: cell centres of the smallest square grid."""
    g = math.ceil(math.sqrt(n_donors))
    sites = []
    for i in range(g):
        for j in range(g):
            sites.append(((i + 0.5) * side / g, (j + 0.5) * side / g))
    return sites[:n_donors]


def generate_topology(
    n_nodes,
    n_donors,
    area_m2,
    max_link_range=300.0,
    seed=0,
    height_m=15.0,
    buffer_capacity=512,
    max_retries=100,
):
    """Uniform random deployment in a square of the given area, donors at
    evenly spaced positions; retries placements until every IAB node can
    reach a donor."""
    if n_nodes < 1:
        raise ValueError("n_nodes must be >= 1")
    if n_donors < 1:
        raise ValueError("n_donors must be >= 1")
    if area_m2 <= 0:
        raise ValueError("area_m2 must be positive")
    side = math.sqrt(area_m2)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    donor_xy = _donor_positions(n_donors, side)
    for _ in range(max_retries):
        xy = rng.uniform(0.0, side, size=(n_nodes, 2))
        nodes = [
            Node(i, float(xy[i, 0]), float(xy[i, 1]), height_m, KIND_NODE, buffer_capacity)
            for i in range(n_nodes)
        ]
        nodes += [
            Node(n_nodes + k, float(x), float(y), height_m, KIND_DONOR, buffer_capacity)
            for k, (x, y) in enumerate(donor_xy)
        ]
        topology = Topology(
            nodes=tuple(nodes),
            donor_ids=frozenset(range(n_nodes, n_nodes + n_donors)),
            candidate_edges=_candidate_edges(nodes, max_link_range),
            max_link_range_m=float(max_link_range),
        )
        if donors_reach_all_nodes(topology):
            return _validate(topology)
    raise TopologyError(
        f"could not generate a donor-connected deployment in {max_retries} tries; "
        "the area/range/node-count combination looks infeasible"
    )


def load_topology(path):
    """Topology from the JSON schema; all invariants are validated."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise TopologyError(f"could not parse topology file {path}: {exc}") from exc
    try:
        raw_nodes = sorted(doc["nodes"], key=lambda d: d["id"])
        nodes = tuple(
            Node(
                id=int(d["id"]),
                x_m=float(d["x_m"]),
                y_m=float(d["y_m"]),
                height_m=float(d["height_m"]),
                kind=_KIND_FROM_JSON[d["kind"]],
                buffer_capacity=int(d.get("buffer_capacity", 512)),
            )
            for d in raw_nodes
        )
        max_range = float(doc["max_link_range_m"])
    except (KeyError, TypeError, ValueError) as exc:
        raise TopologyError(f"could not parse topology file {path}: {exc}") from exc
    topology = Topology(
        nodes=nodes,
        donor_ids=frozenset(n.id for n in nodes if n.is_donor),
        candidate_edges=_candidate_edges(nodes, max_range),
        max_link_range_m=max_range,
    )
    return _validate(topology)


def save_topology(topology, path):
    doc = {
        "nodes": [
            {
                "id": n.id,
                "x_m": n.x_m,
                "y_m": n.y_m,
                "height_m": n.height_m,
                "kind": _JSON_KIND[n.kind],
                "buffer_capacity": n.buffer_capacity,
            }
            for n in topology.nodes
        ],
        "max_link_range_m": topology.max_link_range_m,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)


def available_edges(topology, availability, slot):
    """Candidate edges minus the ones flagged unavailable this slot."""
    missing = [e for e in topology.candidate_edges if e not in availability]
    if missing:
        raise ValueError(f"availability flags missing for {len(missing)} candidate edges")
    edges = frozenset(e for e in topology.candidate_edges if availability[e])
    return EdgeSet(slot=slot, edges=edges)
