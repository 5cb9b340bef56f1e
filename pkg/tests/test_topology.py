import json
import math

import pytest

from iabsim.topology import (
    EdgeSet,
    TopologyError,
    available_edges,
    donors_reach_all_nodes,
    generate_topology,
    load_topology,
    save_topology,
)


def test_generate_paper_scale_node_count():
    # at this density a 300 m range sits below the connectivity threshold of a
    # random deployment, so the full-scale configuration uses a longer reach
    topo = generate_topology(n_nodes=223, n_donors=3, area_m2=15e6, max_link_range=500.0, seed=1)
    assert len(topo.nodes) == 226
    assert len(topo.donor_ids) == 3
    assert donors_reach_all_nodes(topo)


def test_generate_minimal_two_node_network():
    topo = generate_topology(n_nodes=1, n_donors=1, area_m2=100.0, max_link_range=1000.0, seed=0)
    assert len(topo.nodes) == 2
    assert len(topo.candidate_edges) == 2  # both directed pairs
    assert (0, 1) in topo.candidate_edges and (1, 0) in topo.candidate_edges


def test_generate_deterministic():
    a = generate_topology(n_nodes=3, n_donors=1, area_m2=1e4, max_link_range=200.0, seed=42)
    b = generate_topology(n_nodes=3, n_donors=1, area_m2=1e4, max_link_range=200.0, seed=42)
    assert a == b
    c = generate_topology(n_nodes=3, n_donors=1, area_m2=1e4, max_link_range=200.0, seed=43)
    assert a != c


def test_generate_connectivity_holds_across_seeds():
    for seed in range(8):
        topo = generate_topology(n_nodes=20, n_donors=2, area_m2=1.3e6, max_link_range=300.0, seed=seed)
        assert donors_reach_all_nodes(topo)
        # ids dense and donors at the tail
        assert [n.id for n in topo.nodes] == list(range(22))
        assert topo.donor_ids == frozenset({20, 21})


def test_generate_infeasible_raises():
    with pytest.raises(TopologyError):
        generate_topology(
            n_nodes=30, n_donors=1, area_m2=1e9, max_link_range=10.0, seed=0, max_retries=5
        )


def test_generate_validates_arguments():
    with pytest.raises(ValueError):
        generate_topology(n_nodes=0, n_donors=1, area_m2=1e4, max_link_range=100.0, seed=0)
    with pytest.raises(ValueError):
        generate_topology(n_nodes=1, n_donors=0, area_m2=1e4, max_link_range=100.0, seed=0)
    with pytest.raises(ValueError):
        generate_topology(n_nodes=1, n_donors=1, area_m2=-5.0, max_link_range=100.0, seed=0)


def test_no_self_loops_and_edges_within_range():
    topo = generate_topology(n_nodes=15, n_donors=2, area_m2=1e6, max_link_range=350.0, seed=3)
    pos = {n.id: (n.x_m, n.y_m, n.height_m) for n in topo.nodes}
    for u, v in topo.candidate_edges:
        assert u != v
        dx = pos[u][0] - pos[v][0]
        dy = pos[u][1] - pos[v][1]
        dz = pos[u][2] - pos[v][2]
        assert math.sqrt(dx * dx + dy * dy + dz * dz) <= 350.0 + 1e-9


# ---------------------------------------------------------------- file I/O


VALID_DOC = {
    "nodes": [
        {"id": 0, "x_m": 0.0, "y_m": 0.0, "height_m": 15.0, "kind": "node", "buffer_capacity": 512},
        {"id": 1, "x_m": 50.0, "y_m": 0.0, "height_m": 15.0, "kind": "donor", "buffer_capacity": 512},
    ],
    "max_link_range_m": 300.0,
}


def test_load_valid_file(tmp_path):
    p = tmp_path / "topo.json"
    p.write_text(json.dumps(VALID_DOC))
    topo = load_topology(p)
    assert len(topo.nodes) == 2
    assert topo.donor_ids == frozenset({1})
    assert (0, 1) in topo.candidate_edges


def test_load_zero_donors_names_invariant(tmp_path):
    doc = json.loads(json.dumps(VALID_DOC))
    doc["nodes"][1]["kind"] = "node"
    p = tmp_path / "topo.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(TopologyError, match="donor"):
        load_topology(p)


def test_load_disconnected_names_invariant(tmp_path):
    doc = json.loads(json.dumps(VALID_DOC))
    doc["nodes"][0]["x_m"] = 1e6  # far outside link range
    p = tmp_path / "topo.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(TopologyError, match="reach"):
        load_topology(p)


def test_load_parse_error(tmp_path):
    p = tmp_path / "topo.json"
    p.write_text("{not json")
    with pytest.raises(TopologyError, match="parse"):
        load_topology(p)


def test_round_trip(tmp_path):
    topo = generate_topology(n_nodes=10, n_donors=2, area_m2=5e5, max_link_range=300.0, seed=9)
    p = tmp_path / "topo.json"
    save_topology(topo, p)
    assert load_topology(p) == topo


# ----------------------------------------------------------- available_edges


def test_available_edges_all_flags_up():
    topo = generate_topology(n_nodes=5, n_donors=1, area_m2=1e5, max_link_range=400.0, seed=2)
    flags = {e: True for e in topo.candidate_edges}
    es = available_edges(topo, flags, slot=7)
    assert es.slot == 7
    assert es.edges == topo.candidate_edges


def test_available_edges_all_blocked():
    topo = generate_topology(n_nodes=5, n_donors=1, area_m2=1e5, max_link_range=400.0, seed=2)
    flags = {e: False for e in topo.candidate_edges}
    assert available_edges(topo, flags, slot=0).edges == frozenset()


def test_available_edges_one_blocked():
    topo = generate_topology(n_nodes=1, n_donors=1, area_m2=100.0, max_link_range=1000.0, seed=0)
    flags = {e: True for e in topo.candidate_edges}
    victim = next(iter(topo.candidate_edges))
    flags[victim] = False
    es = available_edges(topo, flags, slot=1)
    assert victim not in es.edges
    assert len(es.edges) == len(topo.candidate_edges) - 1


def test_available_edges_requires_full_flags():
    topo = generate_topology(n_nodes=2, n_donors=1, area_m2=100.0, max_link_range=1000.0, seed=0)
    with pytest.raises(ValueError):
        available_edges(topo, {}, slot=0)


def test_available_edges_always_subset():
    topo = generate_topology(n_nodes=12, n_donors=2, area_m2=8e5, max_link_range=300.0, seed=5)
    import numpy as np

    rng = np.random.default_rng(0)
    for _ in range(20):
        flags = {e: bool(rng.random() < 0.6) for e in topo.candidate_edges}
        es = available_edges(topo, flags, slot=0)
        assert es.edges <= topo.candidate_edges
