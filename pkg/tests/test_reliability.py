"""Connectivity, disconnectivity, and the combined reliability score."""

import math

import numpy as np
import pytest

from perc import (
    Clustering,
    ReliabilityParams,
    UncertainGraph,
    block_connectivity,
    connectivity_exact,
    connectivity_mc,
    disconnectivity,
    reliability,
)

from conftest import connectivity_by_enumeration, random_small_graph


def random_block_graph(rng, n_max=6, max_edges=12):
    """A single-block instance: members plus random intra edges."""
    n = int(rng.integers(2, n_max + 1))
    members = [f"m{i}" for i in range(n)]
    pairs = [(members[i], members[j]) for i in range(n) for j in range(i + 1, n)]
    rng.shuffle(pairs)
    count = int(rng.integers(0, min(len(pairs), max_edges) + 1))
    edges = {tuple(pair): float(rng.uniform(0.05, 0.95)) for pair in pairs[:count]}
    return UncertainGraph(members, edges=edges), members


class TestDisconnectivity:
    def test_worked_values(self, running_graph, running_clustering):
        c1, c2, c3, c4 = running_clustering.blocks
        assert disconnectivity(running_graph, running_clustering, c1, c2) == \
            pytest.approx(0.82, abs=1e-12)
        assert disconnectivity(running_graph, running_clustering, c3, c4) == \
            pytest.approx(0.79, abs=1e-12)
        assert disconnectivity(running_graph, running_clustering, c1, c3) == 1.0
        assert disconnectivity(running_graph, running_clustering, c2, c4) == 1.0

    def test_trio_value(self, trio_graph, trio_clustering):
        # NO probabilities 0.8 and 0.4: 1 - 0.2 * 0.6 = 0.88
        abc, d = trio_clustering.blocks
        assert disconnectivity(trio_graph, trio_clustering, abc, d) == \
            pytest.approx(0.88, abs=1e-12)

    def test_no_spanning_edges_means_zero(self):
        g = UncertainGraph.from_probabilities("ABCD", {("A", "B"): 0.9})
        c = Clustering([["A", "B"], ["C", "D"]])
        assert disconnectivity(g, c, ("A", "B"), ("C", "D")) == 0.0

    def test_symmetric_in_block_order(self, running_graph, running_clustering):
        c1, c2 = running_clustering.blocks[:2]
        assert disconnectivity(running_graph, running_clustering, c2, c1) == \
            disconnectivity(running_graph, running_clustering, c1, c2)

    def test_certain_no_edge_gives_one(self):
        g = UncertainGraph.from_probabilities("ABC", {("A", "C"): 0.0})
        c = Clustering([["A", "B"], ["C"]])
        assert disconnectivity(g, c, ("A", "B"), ("C",)) == 1.0

    def test_rejects_foreign_block(self, running_graph, running_clustering):
        with pytest.raises(ValueError):
            disconnectivity(running_graph, running_clustering, ("A", "B"), ("C",))
        with pytest.raises(ValueError):
            disconnectivity(running_graph, running_clustering,
                            ("A", "B"), ("A", "B"))


class TestConnectivityExact:
    def test_singleton_is_certain(self):
        g = UncertainGraph(["A"])
        assert connectivity_exact(g, ["A"]).value == 1.0

    def test_single_edge(self):
        g = UncertainGraph.from_probabilities("AB", {("A", "B"): 0.8})
        assert connectivity_exact(g, "AB").value == pytest.approx(0.8)

    def test_no_edges_means_disconnected(self):
        g = UncertainGraph(["A", "B"])
        assert connectivity_exact(g, "AB").value == 0.0

    def test_trio_worked_value(self, trio_graph):
        # Path 0.9 - 0.8, no third edge: 0.9 * 0.8 = 0.72
        est = connectivity_exact(trio_graph, ("A", "B", "C"))
        assert est.value == pytest.approx(0.72, abs=1e-12)
        assert est.method == "exact"

    def test_triangle_closed_form(self):
        p = {("A", "B"): 0.5, ("B", "C"): 0.5, ("A", "C"): 0.5}
        g = UncertainGraph.from_probabilities("ABC", p)
        # all three pairs of edges + the full triangle: 3 * 0.125 + 0.125
        assert connectivity_exact(g, "ABC").value == pytest.approx(0.5)

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(60):
            g, members = random_block_graph(rng)
            expected = connectivity_by_enumeration(members, dict(g.edge_items()))
            got = connectivity_exact(g, members).value
            assert got == pytest.approx(expected, abs=1e-10)

    def test_certain_edges_handled(self):
        g = UncertainGraph.from_probabilities(
            "ABC", {("A", "B"): 1.0, ("B", "C"): 0.0, ("A", "C"): 0.6})
        expected = connectivity_by_enumeration(
            ["A", "B", "C"], dict(g.edge_items()))
        assert connectivity_exact(g, "ABC").value == pytest.approx(expected)

    def test_rejects_over_edge_limit(self):
        members = [f"m{i}" for i in range(7)]
        edges = {(a, b): 0.5 for i, a in enumerate(members)
                 for b in members[i + 1:]}
        g = UncertainGraph(members, edges=edges)
        with pytest.raises(ValueError, match="connectivity_mc"):
            connectivity_exact(g, members, edge_limit=18)
        assert connectivity_exact(g, members, edge_limit=21).value > 0


class TestConnectivityMC:
    def test_deterministic_for_fixed_seed(self, trio_graph):
        params = ReliabilityParams(mc_samples=500, seed=42)
        a = connectivity_mc(trio_graph, "ABC", params)
        b = connectivity_mc(trio_graph, "ABC", params)
        assert a == b
        assert a.method == "monte-carlo"
        assert a.samples == 500

    def test_different_seed_different_stream(self, trio_graph):
        a = connectivity_mc(trio_graph, "ABC", ReliabilityParams(mc_samples=200, seed=1))
        b = connectivity_mc(trio_graph, "ABC", ReliabilityParams(mc_samples=200, seed=2))
        assert a.seed != b.seed

    def test_close_to_exact(self):
        rng = np.random.default_rng(23)
        params = ReliabilityParams(mc_samples=4000, seed=9)
        for _ in range(10):
            g, members = random_block_graph(rng)
            exact = connectivity_exact(g, members).value
            sampled = connectivity_mc(g, members, params).value
            sigma = math.sqrt(max(exact * (1 - exact), 1e-9) / params.mc_samples)
            assert abs(sampled - exact) <= 4 * sigma + 0.01

    def test_certain_graph_sampled_exactly(self):
        g = UncertainGraph.from_probabilities(
            "ABC", {("A", "B"): 1.0, ("B", "C"): 1.0})
        est = connectivity_mc(g, "ABC", ReliabilityParams(mc_samples=50, seed=0))
        assert est.value == 1.0
        g0 = UncertainGraph.from_probabilities("ABC", {("A", "B"): 1.0})
        est0 = connectivity_mc(g0, "ABC", ReliabilityParams(mc_samples=50, seed=0))
        assert est0.value == 0.0


class TestBlockConnectivity:
    def test_picks_exact_for_sparse_blocks(self, trio_graph):
        est = block_connectivity(trio_graph, ("A", "B", "C"), ReliabilityParams())
        assert est.method == "exact"
        assert est.value == pytest.approx(0.72)

    def test_switches_to_sampling_over_limit(self, trio_graph):
        params = ReliabilityParams(exact_edge_limit=1, mc_samples=300, seed=5)
        est = block_connectivity(trio_graph, ("A", "B", "C"), params)
        assert est.method == "monte-carlo"

    def test_extra_pair_acts_as_certain_edge(self):
        g = UncertainGraph.from_probabilities("ABC", {("A", "B"): 0.9})
        params = ReliabilityParams()
        base = block_connectivity(g, "ABC", params)
        assert base.value == 0.0
        boosted = block_connectivity(g, "ABC", params, extra_pair=("C", "B"))
        assert boosted.value == pytest.approx(0.9)

    def test_extra_pair_counts_toward_method_choice(self, trio_graph):
        params = ReliabilityParams(exact_edge_limit=2, mc_samples=100, seed=0)
        plain = block_connectivity(trio_graph, "ABC", params)
        assert plain.method == "exact"
        extra = block_connectivity(trio_graph, "ABC", params, extra_pair=("A", "C"))
        assert extra.method == "monte-carlo"

    def test_extra_pair_must_be_inside_block(self, running_graph):
        with pytest.raises(ValueError):
            block_connectivity(running_graph, ("A", "B"), ReliabilityParams(),
                               extra_pair=("A", "C"))

    def test_same_stream_with_and_without_extra_pair(self):
        # With/without comparisons share one derived seed, so the
        # hypothetical-edge variant reuses the identical random stream.
        members = [f"m{i}" for i in range(6)]
        rng = np.random.default_rng(31)
        edges = {}
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                edges[(a, b)] = float(rng.uniform(0.2, 0.8))
        g = UncertainGraph(members, edges=edges)
        params = ReliabilityParams(exact_edge_limit=2, mc_samples=400, seed=77)
        without = block_connectivity(g, members, params)
        with_extra = block_connectivity(g, members, params,
                                        extra_pair=(members[0], members[1]))
        assert without.method == with_extra.method == "monte-carlo"
        assert without.seed == with_extra.seed


class TestReliability:
    def test_trio_worked_value(self, trio_graph, trio_clustering):
        # log10(0.72) + log10(0.88) = -0.198185...
        score = reliability(trio_graph, trio_clustering)
        assert score.value == pytest.approx(-0.199, abs=1e-3)
        assert score.value == pytest.approx(
            math.log10(0.72) + math.log10(0.88), abs=1e-12)
        assert [e.value for e in score.block_connectivity] == [
            pytest.approx(0.72), pytest.approx(1.0)]
        assert list(score.pair_disconnectivity) == [pytest.approx(0.88)]

    def test_running_example_value(self, running_graph, running_clustering):
        score = reliability(running_graph, running_clustering)
        expected = 4 * math.log10(0.8) + math.log10(0.82) + math.log10(0.79)
        assert score.value == pytest.approx(expected, abs=1e-12)

    def test_epsilon_clamps_zero_components(self):
        g = UncertainGraph(["A", "B", "C"])
        c = Clustering([["A", "B"], ["C"]])
        # Block {A,B} has no intra edge (connectivity 0) and no spanning
        # edge separates the blocks (disconnectivity 0): two clamps.
        score = reliability(g, c, ReliabilityParams(epsilon=1e-12))
        assert score.value == pytest.approx(2 * math.log10(1e-12))

    def test_epsilon_is_configurable(self):
        g = UncertainGraph(["A", "B"])
        c = Clustering([["A", "B"]])
        loose = reliability(g, c, ReliabilityParams(epsilon=1e-6))
        tight = reliability(g, c, ReliabilityParams(epsilon=1e-12))
        assert loose.value == pytest.approx(-6.0)
        assert tight.value == pytest.approx(-12.0)

    def test_all_singletons_reliability(self, running_graph):
        # Every singleton block is trivially connected; every block pair
        # p(e) = 0 edge spanning it is a certain separator.
        c = Clustering.singletons(running_graph.records)
        score = reliability(running_graph, c)
        for est in score.block_connectivity:
            assert est.value == 1.0

    def test_monotone_in_separator_strength(self):
        # Raising a spanning edge's NO probability cannot hurt the score.
        previous = None
        for p_yes in [0.9, 0.7, 0.5, 0.3, 0.1]:
            g = UncertainGraph.from_probabilities(
                "ABC", {("A", "B"): 0.8, ("B", "C"): p_yes})
            c = Clustering([["A", "B"], ["C"]])
            value = reliability(g, c).value
            if previous is not None:
                assert value >= previous
            previous = value

    def test_rejects_mismatched_records(self, trio_graph):
        with pytest.raises(ValueError):
            reliability(trio_graph, Clustering([["A", "B"]]))


class TestMonotonicityProperty:
    def test_reliability_never_drops_as_separators_strengthen(self):
        # Scale every cross-block edge's YES probability by (1 - q): at
        # q = 0 the instance is untouched; larger q means stronger
        # separators and (weakly) larger reliability.
        rng = np.random.default_rng(41)
        for _ in range(15):
            g = random_small_graph(rng, n_min=4, n_max=7, p_edge=0.8)
            recs = list(g.records)
            half = len(recs) // 2
            c = Clustering([recs[:half], recs[half:]])
            base_edges = dict(g.edge_items())
            previous = None
            for q in np.linspace(0.0, 1.0, 6):
                edges = {}
                for (a, b), p in base_edges.items():
                    if c.same_block(a, b):
                        edges[(a, b)] = p
                    else:
                        edges[(a, b)] = p * (1.0 - float(q))
                scaled = UncertainGraph(recs, edges=edges)
                value = reliability(scaled, c).value
                if previous is None:
                    assert value == pytest.approx(reliability(g, c).value)
                else:
                    assert value >= previous - 1e-9
                previous = value
