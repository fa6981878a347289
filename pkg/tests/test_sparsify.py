import json
import random

import pytest

from evograph.community import CommunityStructure, detect_fastgreedy, merge_small
from evograph.graph import Graph, GraphError, betweenness, is_connected, label_key, load_edge_list
from evograph.sparsify import (
    SparsifiedGraph,
    community_quotas,
    serialize_node_map,
    sparsify,
    sparsify_if_large,
    write_sparsified,
)
from evograph import synth

from oracles import brute_force_betweenness


class TestQuotas:
    def test_proportional(self):
        cs = CommunityStructure.from_sets([set(range(10)), set(range(10, 100))])
        assert community_quotas(cs, 100, 50) == [5, 45]

    def test_ceiling_forces_representation(self):
        cs = CommunityStructure.from_sets([{0}, set(range(1, 100))])
        assert community_quotas(cs, 100, 50)[0] == 1

    def test_exact_proportions(self):
        sizes = [list(range(60)), list(range(60, 90)), list(range(90, 100))]
        cs = CommunityStructure.from_sets([set(s) for s in sizes])
        assert community_quotas(cs, 100, 50) == [30, 15, 5]

    def test_empty_structure_errors(self):
        cs = CommunityStructure.from_sets([{0}])
        object.__setattr__(cs, "communities", ())
        with pytest.raises(GraphError):
            community_quotas(cs, 10, 5)


def planted(seed: int, sizes=(40, 30, 30)) -> tuple[Graph, CommunityStructure]:
    g = synth.planted_partition(list(sizes), 0.25, 0.02, seed=seed)
    return g, detect_fastgreedy(g)


class TestSparsify:
    def test_selection_is_betweenness_prefix_against_oracle(self):
        g = synth.planted_partition([10, 10, 10], 0.5, 0.05, seed=6)
        cs = detect_fastgreedy(g)
        sg = sparsify(g, cs, n_v=15, n_e=40, rng_seed=0)
        oracle_bc = brute_force_betweenness(g)
        for comm, quota, chosen in zip(cs.communities, sg.quotas, sg.selected):
            ranked = sorted(comm, key=lambda lab: (-oracle_bc[lab], label_key(lab)))
            assert list(chosen) == ranked[:quota]

    def test_identity_path(self):
        g = synth.cycle_graph(8)
        cs = CommunityStructure.from_sets([set(range(4)), set(range(4, 8))])
        sg = sparsify(g, cs, n_v=8, n_e=10, rng_seed=1)
        assert sg.graph.n == 8 and sg.graph.edge_count == 8
        back = {sg.node_map[lab] for lab in sg.graph.nodes()}
        assert back == set(g.nodes())

    def test_edge_budget_enforced(self):
        g, cs = planted(8)
        sg = sparsify(g, cs, n_v=50, n_e=60, rng_seed=3)
        assert sg.graph.edge_count <= 60
        assert is_connected(sg.graph)
        assert sg.prune_report.edges_removed == sg.prune_report.edges_before - 60

    def test_degree_keep_policy_removes_smallest_sums(self):
        g, cs = planted(9)
        sg = sparsify(g, cs, n_v=40, n_e=50, prune_policy="degree_keep", rng_seed=0)
        assert sg.graph.edge_count <= 50

    def test_deterministic_across_runs(self):
        g, cs = planted(10)
        a = sparsify(g, cs, 30, 50, rng_seed=42)
        b = sparsify(g, cs, 30, 50, rng_seed=42)
        assert list(a.graph.edges()) == list(b.graph.edges())
        assert a.node_map == b.node_map

    def test_different_seed_differs(self):
        g, cs = planted(12, sizes=(50, 40, 40))
        a = sparsify(g, cs, 40, 40, rng_seed=1)
        b = sparsify(g, cs, 40, 40, rng_seed=2)
        assert list(a.graph.edges()) != list(b.graph.edges())

    def test_quota_clamp_recorded(self):
        g = synth.cycle_graph(6)
        cs = CommunityStructure.from_sets([{0}, set(range(1, 6))])
        sg = sparsify(g, cs, n_v=12, n_e=10, rng_seed=0)
        assert sg.prune_report.quota_clamped >= 1

    def test_node_map_roundtrip(self):
        g, cs = planted(13)
        sg = sparsify(g, cs, 25, 40, rng_seed=5)
        members = tuple(sg.graph.nodes())[:5]
        assert sg.to_working(sg.to_original(members)) == members

    def test_working_labels_dense_ints(self):
        g, _ = load_edge_list("\n".join(f"n{i} n{i+1}" for i in range(30)))
        cs = detect_fastgreedy(g)
        sg = sparsify(g, cs, 10, 12, rng_seed=2)
        assert set(sg.graph.nodes()) == set(range(sg.graph.n))


class TestSparsifyIfLarge:
    def test_small_node_count_passes_through(self):
        g = synth.erdos_renyi(40, 0.5, seed=1)  # many edges, few nodes
        cs = detect_fastgreedy(g)
        sg = sparsify_if_large(g, cs, 50, 100)
        assert not sg.sparsified
        assert sg.graph is g
        assert sg.node_map == {lab: lab for lab in g.nodes()}

    def test_small_edge_count_passes_through(self):
        g = synth.cycle_graph(60)  # 60 nodes > 50 but 60 edges <= 100
        cs = detect_fastgreedy(g)
        assert g.n == 60 and g.edge_count == 60
        assert not sparsify_if_large(g, cs, 50, 100).sparsified

    def test_both_exceeded_sparsifies(self):
        g, cs = planted(14, sizes=(60, 50, 50))
        sg = sparsify_if_large(g, cs, 50, 100)
        assert sg.sparsified
        assert sg.graph.n <= sum(q for q in sg.quotas)
        assert sg.graph.edge_count <= 100


def test_write_sparsified_files(tmp_path):
    g, cs = planted(15)
    sg = sparsify(g, cs, 20, 30, rng_seed=0)
    paths = write_sparsified(sg, tmp_path)
    assert len(paths) == 3
    report = json.loads((tmp_path / "prune_report.json").read_text())
    assert report["edges_removed"] == sg.prune_report.edges_removed
    lines = serialize_node_map(sg).strip().splitlines()
    assert len(lines) == sg.graph.n


def test_full_pipeline_on_merged_communities():
    g = synth.planted_partition([80, 60, 60, 5], 0.2, 0.01, seed=20)
    cs = merge_small(g, detect_fastgreedy(g), 0.02)
    sg = sparsify_if_large(g, cs, 50, 100, rng_seed=9)
    assert sg.sparsified
    assert is_connected(sg.graph)
    assert sg.graph.edge_count <= 100
