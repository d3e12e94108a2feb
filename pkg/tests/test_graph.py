import math
import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupmatch.blocking import BlockingKind
from groupmatch.graph import (
    CleanupParams,
    Component,
    EdgeData,
    MatchGraph,
    build_graph,
    connected_components,
    edge_betweenness,
    graph_cleanup,
    min_edge_cut,
    pre_cleanup,
    transitive_completion,
)
from groupmatch.matcher import Prediction

import oracles

TOKEN = frozenset({BlockingKind.TOKEN_OVERLAP})
ID = frozenset({BlockingKind.ID_OVERLAP})


def graph_of(nodes, edges, provenance=ID):
    g = MatchGraph(nodes)
    for pair in edges:
        g.add_edge(pair, EdgeData(provenance, 1.0))
    return g


def component_of(nodes, edges):
    [comp] = connected_components(graph_of(nodes, edges))
    return comp


def match(a, b, score=0.9):
    return Prediction((a, b) if a < b else (b, a), True, score, ID)


def no_match(a, b):
    return Prediction((a, b) if a < b else (b, a), False, 0.1, ID)


class TestBuildGraph:
    def test_no_positive_predictions_gives_edgeless_graph(self):
        g = build_graph([no_match("a", "b")], ["a", "b", "c"])
        assert g.n_edges == 0
        assert len(connected_components(g)) == 3

    def test_chain_forms_one_component(self):
        g = build_graph([match("a", "b"), match("b", "c")], ["a", "b", "c"])
        [comp] = connected_components(g)
        assert comp.nodes == ("a", "b", "c")

    def test_chain_of_four_records_is_one_component(self):
        # an acquisition chain: only consecutive pairs predicted directly
        preds = [match("11", "21"), match("21", "33"), match("33", "41")]
        g = build_graph(preds, ["11", "21", "33", "41"])
        [comp] = connected_components(g)
        assert set(comp.nodes) == {"11", "21", "33", "41"}

    def test_duplicate_edges_keep_max_score_and_union_provenance(self):
        preds = [
            Prediction(("a", "b"), True, 0.6, TOKEN),
            Prediction(("a", "b"), True, 0.9, ID),
        ]
        g = build_graph(preds, ["a", "b"])
        data = g.edge_data(("a", "b"))
        assert data.score == 0.9
        assert data.provenance == TOKEN | ID

    def test_unknown_id_rejected(self):
        with pytest.raises(KeyError, match="zz"):
            build_graph([match("a", "zz")], ["a", "b"])


class TestConnectedComponents:
    def test_edgeless_graph_gives_singletons(self):
        comps = connected_components(graph_of(["a", "b", "c"], []))
        assert [c.nodes for c in comps] == [("a",), ("b",), ("c",)]

    def test_two_triangles(self):
        edges = [("a", "b"), ("b", "c"), ("a", "c"), ("x", "y"), ("y", "z"), ("x", "z")]
        comps = connected_components(graph_of(list("abcxyz"), edges))
        assert [len(c) for c in comps] == [3, 3]

    def test_matches_reachability_oracle_on_random_graphs(self):
        rng = random.Random(90)
        for _ in range(40):
            nodes, edges = oracles.random_connected_graph(rng)
            extra = [f"iso{i}" for i in range(rng.randint(0, 3))]
            comps = connected_components(graph_of(nodes + extra, edges))
            assert {frozenset(c.nodes) for c in comps} == oracles.components_brute(
                nodes + extra, edges
            )


class TestMinEdgeCut:
    def test_path_cut_is_single_edge(self):
        comp = component_of(list("abc"), [("a", "b"), ("b", "c")])
        assert len(min_edge_cut(comp)) == 1

    def test_bridge_between_triangles_is_the_cut(self):
        edges = [("a", "b"), ("b", "c"), ("a", "c"),
                 ("x", "y"), ("y", "z"), ("x", "z"), ("c", "x")]
        comp = component_of(list("abcxyz"), edges)
        assert min_edge_cut(comp) == [("c", "x")]

    def test_cycle_needs_two_edges(self):
        comp = component_of(list("abcd"), [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")])
        cut = min_edge_cut(comp)
        assert len(cut) == 2
        # brute force confirms no single edge disconnects a cycle
        assert oracles.edge_connectivity_brute(list("abcd"), list(comp.edges), max_k=2) == 2

    def test_singleton_component_rejected(self):
        with pytest.raises(ValueError):
            min_edge_cut(Component(("a",), ()))

    def test_removal_disconnects_on_random_graphs(self):
        rng = random.Random(91)
        for _ in range(40):
            nodes, edges = oracles.random_connected_graph(rng, max_nodes=10, max_edges=14)
            comp = component_of(nodes, edges)
            cut = min_edge_cut(comp)
            remaining = [e for e in edges if e not in set(cut)]
            assert not oracles.is_connected(nodes, remaining)


class TestEdgeBetweenness:
    def test_single_edge(self):
        comp = component_of(["a", "b"], [("a", "b")])
        assert edge_betweenness(comp) == {("a", "b"): pytest.approx(1.0)}

    def test_path_of_three(self):
        # pairs {a,b}, {b,c} and {a,c}: each edge lies on two of the three
        comp = component_of(list("abc"), [("a", "b"), ("b", "c")])
        eb = edge_betweenness(comp)
        assert eb[("a", "b")] == pytest.approx(2.0)
        assert eb[("b", "c")] == pytest.approx(2.0)

    def test_triangle_edges_all_one(self):
        comp = component_of(list("abc"), [("a", "b"), ("b", "c"), ("a", "c")])
        assert all(v == pytest.approx(1.0) for v in edge_betweenness(comp).values())

    def test_matches_path_enumeration_oracle(self):
        rng = random.Random(92)
        for _ in range(40):
            nodes, edges = oracles.random_connected_graph(rng)
            comp = component_of(nodes, edges)
            expected = oracles.edge_betweenness_brute(nodes, edges)
            actual = edge_betweenness(comp)
            assert actual.keys() == expected.keys()
            for edge, value in expected.items():
                assert actual[edge] == pytest.approx(value, abs=1e-9)

    def test_doubling_values_never_changes_the_argmax(self):
        # summing over ordered instead of unordered pairs scales by 2
        rng = random.Random(93)
        for _ in range(20):
            nodes, edges = oracles.random_connected_graph(rng)
            comp = component_of(nodes, edges)
            eb = edge_betweenness(comp)
            pick = min(eb.items(), key=lambda kv: (-kv[1], kv[0]))[0]
            doubled = {e: 2 * v for e, v in eb.items()}
            pick2 = min(doubled.items(), key=lambda kv: (-kv[1], kv[0]))[0]
            assert pick == pick2


def barbell(k):
    """Two k-cliques joined by a single bridge."""
    left = [f"a{i}" for i in range(k)]
    right = [f"b{i}" for i in range(k)]
    edges = [*combinations(left, 2), *combinations(right, 2), (left[-1], right[0])]
    return left + right, [tuple(sorted(e)) for e in edges]


class TestGraphCleanup:
    def test_small_components_untouched(self):
        g = graph_of(list("abcd"), [("a", "b"), ("c", "d")])
        result = graph_cleanup(g, CleanupParams(gamma=25, mu=5))
        assert result.removed == []
        assert result.graph.n_edges == 2

    def test_bridge_between_two_dense_groups_removed(self):
        # two true 4-record groups fused by one false positive edge
        nodes, edges = barbell(4)
        result = graph_cleanup(graph_of(nodes, edges), CleanupParams(gamma=25, mu=4))
        assert [(e, p) for e, p in result.removed] == [(("a3", "b0"), "betweenness")]
        assert sorted(len(c) for c in result.components) == [4, 4]

    def test_barbell_with_paper_style_thresholds(self):
        # size 8 <= gamma=25 so the cut phase is skipped; betweenness takes
        # the bridge, which carries all 16 cross pairs
        nodes, edges = barbell(4)
        comp = component_of(nodes, edges)
        eb = edge_betweenness(comp)
        assert eb[("a3", "b0")] == pytest.approx(16.0)
        result = graph_cleanup(graph_of(nodes, edges), CleanupParams(gamma=25, mu=5))
        assert {e for e, phase in result.removed if phase == "mincut"} == set()
        assert sorted(len(c) for c in result.components) == [4, 4]

    def test_gamma_equal_mu_uses_cuts_only(self):
        nodes, edges = barbell(4)
        result = graph_cleanup(graph_of(nodes, edges), CleanupParams(gamma=4, mu=4))
        assert {phase for _, phase in result.removed} == {"mincut"}
        assert all(len(c) <= 4 for c in result.components)

    def test_infinite_gamma_uses_betweenness_only(self):
        nodes, edges = barbell(5)
        params = CleanupParams(gamma=math.inf, mu=3)
        result = graph_cleanup(graph_of(nodes, edges), params)
        assert {phase for _, phase in result.removed} == {"betweenness"}
        assert all(len(c) <= 3 for c in result.components)

    def test_params_validation(self):
        with pytest.raises(ValueError):
            CleanupParams(gamma=3, mu=5)
        with pytest.raises(ValueError):
            CleanupParams(mu=0)
        CleanupParams(gamma=math.inf, mu=1)  # fine

    @given(st.integers(0, 10_000), st.integers(2, 6))
    @settings(max_examples=60, deadline=None)
    def test_size_bound_subset_and_determinism(self, seed, mu):
        nodes, edges = oracles.random_connected_graph(random.Random(seed), 14, 24)
        params = CleanupParams(gamma=max(mu, 2 * mu), mu=mu)
        first = graph_cleanup(graph_of(nodes, edges), params)
        second = graph_cleanup(graph_of(nodes, edges), params)
        assert all(len(c) <= mu for c in first.components)
        assert set(first.graph.edges()) <= set(edges)
        assert first.removed == second.removed
        assert [c.nodes for c in first.components] == [c.nodes for c in second.components]

    def test_parallel_equals_sequential(self):
        rng = random.Random(7)
        g = MatchGraph()
        for offset in range(6):  # six independent oversized components
            nodes, edges = oracles.random_connected_graph(rng, 12, 20)
            nodes = [f"{offset}:{n}" for n in nodes]
            for n in nodes:
                g.add_node(n)
            for a, b in edges:
                g.add_edge((f"{offset}:{a}", f"{offset}:{b}"))
        params = CleanupParams(gamma=8, mu=4)
        seq = graph_cleanup(g.copy(), params, workers=1)
        par = graph_cleanup(g.copy(), params, workers=4)
        assert seq.removed == par.removed
        assert [c.nodes for c in seq.components] == [c.nodes for c in par.components]


class TestPreCleanup:
    def star(self, n, provenance):
        nodes = [f"n{i:03d}" for i in range(n)]
        g = MatchGraph(nodes)
        for leaf in nodes[1:]:
            g.add_edge((nodes[0], leaf), EdgeData(provenance, 0.8))
        return g

    def test_oversized_token_only_component_shattered(self):
        g = self.star(51, TOKEN)
        cleaned, removed = pre_cleanup(g, limit=50)
        assert len(removed) == 50
        assert cleaned.n_edges == 0
        assert len(connected_components(cleaned)) == 51

    def test_component_at_the_limit_untouched(self):
        g = self.star(50, TOKEN)
        cleaned, removed = pre_cleanup(g, limit=50)
        assert removed == []
        assert cleaned.n_edges == 50 - 1

    def test_non_token_provenance_protected(self):
        g = self.star(51, ID)
        cleaned, removed = pre_cleanup(g, limit=50)
        assert removed == []
        assert cleaned.n_edges == 50

    def test_mixed_provenance_edge_protected(self):
        g = self.star(51, TOKEN | ID)
        _, removed = pre_cleanup(g, limit=50)
        assert removed == []

    def test_iterates_to_fixpoint(self):
        # two oversized stars joined by an id edge: the first pass shatters
        # both stars; nothing oversized remains afterwards
        g = self.star(60, TOKEN)
        extra = [f"m{i:03d}" for i in range(60)]
        for n in extra:
            g.add_node(n)
        for leaf in extra[1:]:
            g.add_edge((extra[0], leaf), EdgeData(TOKEN, 0.8))
        g.add_edge(("n000", "m000"), EdgeData(ID, 1.0))
        cleaned, removed = pre_cleanup(g, limit=50)
        assert len(removed) == 59 + 59
        assert cleaned.has_edge(("n000", "m000"))
        assert all(len(c) <= 50 for c in connected_components(cleaned))


class TestTransitiveCompletion:
    def test_chain_completes_to_all_six_pairs(self):
        preds = [match("11", "21"), match("21", "33"), match("33", "41")]
        g = build_graph(preds, ["11", "21", "33", "41"])
        completed = transitive_completion(connected_components(g))
        assert completed == {
            ("11", "21"), ("21", "33"), ("33", "41"),
            ("11", "33"), ("11", "41"), ("21", "41"),
        }

    def test_singleton_contributes_nothing(self):
        assert transitive_completion([Component(("a",), ())]) == set()

    @pytest.mark.parametrize("k", range(1, 7))
    def test_component_of_k_nodes_gives_k_choose_2(self, k):
        nodes = tuple(f"n{i}" for i in range(k))
        edges = tuple((nodes[i], nodes[i + 1]) for i in range(k - 1))
        completed = transitive_completion([Component(nodes, edges)])
        assert len(completed) == k * (k - 1) // 2
