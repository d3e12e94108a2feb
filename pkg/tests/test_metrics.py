from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from groupmatch.graph import Component, transitive_completion
from groupmatch.metrics import (
    Stage,
    cluster_purity,
    group_scores,
    pairwise_scores,
    weighted_purity,
)

from conftest import truth_of


class TestPairwiseScores:
    def test_one_of_three_pairs_found(self):
        truth = truth_of({"a", "b", "c"})
        scores = pairwise_scores({("a", "b")}, truth)
        assert scores.tp == 1 and scores.fp == 0 and scores.fn == 2
        assert scores.precision == 1.0
        assert scores.recall == pytest.approx(1 / 3)
        assert scores.f1 == pytest.approx(0.5)

    def test_perfect_prediction(self):
        truth = truth_of({"a", "b"}, {"c", "d", "e"})
        scores = pairwise_scores(truth.true_pairs(), truth)
        assert (scores.precision, scores.recall, scores.f1) == (1.0, 1.0, 1.0)

    def test_empty_prediction_scores_zero_by_convention(self):
        truth = truth_of({"a", "b"})
        scores = pairwise_scores(set(), truth)
        assert (scores.precision, scores.recall, scores.f1) == (0.0, 0.0, 0.0)
        assert scores.tp == 0 and scores.fp == 0 and scores.fn == 1


class TestGroupScores:
    def test_exact_grouping_is_perfect(self, two_truth_groups):
        comps = [{"a1", "a2", "a3", "a4"}, {"b1", "b2", "b3", "b4"}]
        scores = group_scores(comps, two_truth_groups, Stage.POST_CLEANUP)
        assert (scores.precision, scores.recall, scores.f1) == (1.0, 1.0, 1.0)
        assert scores.cluster_purity == 1.0
        assert scores.n_components == 2 and scores.max_component_size == 4

    def test_two_fused_four_groups(self, two_truth_groups):
        # one 8-node component spanning both truth groups: 28 completed
        # pairs of which only the 12 within-group ones are true
        comps = [{"a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4"}]
        scores = group_scores(comps, two_truth_groups, Stage.PRE_CLEANUP)
        assert scores.tp == 12 and scores.fp == 16
        assert scores.precision == pytest.approx(3 / 7)
        assert scores.recall == 1.0

    def test_all_singletons(self, two_truth_groups):
        comps = [{rid} for rid in two_truth_groups.record_ids()]
        scores = group_scores(comps, two_truth_groups, Stage.POST_CLEANUP)
        assert scores.precision == 0.0 and scores.recall == 0.0
        assert scores.cluster_purity == 1.0

    def test_equals_pairwise_over_completion(self, two_truth_groups):
        comps = [
            Component(("a1", "a2", "b1"), (("a1", "a2"), ("a2", "b1"))),
            Component(("a3", "a4"), (("a3", "a4"),)),
        ]
        grouped = group_scores([c.nodes for c in comps], two_truth_groups, Stage.POST_CLEANUP)
        paired = pairwise_scores(transitive_completion(comps), two_truth_groups)
        assert (grouped.tp, grouped.fp, grouped.fn) == (paired.tp, paired.fp, paired.fn)
        assert grouped.precision == paired.precision
        assert grouped.recall == paired.recall

    def test_f1_identity_holds(self, two_truth_groups):
        comps = [{"a1", "a2", "b1"}, {"a3", "a4"}]
        s = group_scores(comps, two_truth_groups, Stage.POST_CLEANUP)
        if s.precision + s.recall:
            assert s.f1 == pytest.approx(
                2 * s.precision * s.recall / (s.precision + s.recall)
            )


class TestClusterPurity:
    def test_pure_components_score_one(self):
        truth = truth_of({"a", "b", "c"}, {"d", "e"})
        assert cluster_purity([{"a", "b"}, {"c"}, {"d", "e"}], truth) == 1.0

    def test_weighted_two_component_formula(self):
        # component of 3 with 2 of 3 pairs true, component of 2 fully true:
        # (3 * 2/3 + 2 * 1) / 5 = 0.8. A partition-valid ground truth cannot
        # put exactly 2 true pairs inside a 3-node component, so the
        # arithmetic is checked at the formula level.
        assert weighted_purity([(3, 2), (2, 1)]) == pytest.approx(0.8)

    def test_one_of_three_true_pairs_in_a_triple(self):
        # realizable counterpart: {x,y} same group, z foreign -> 1 of 3 true
        truth = truth_of({"x", "y"}, {"z"}, {"u", "v"})
        comps = [{"x", "y", "z"}, {"u", "v"}]
        assert cluster_purity(comps, truth) == pytest.approx((3 * (1 / 3) + 2 * 1) / 5)

    def test_fused_pair_of_two_record_groups(self):
        # 4-node component over two disjoint 2-record groups: 2 true of 6
        truth = truth_of({"a", "b"}, {"c", "d"})
        assert cluster_purity([{"a", "b", "c", "d"}], truth) == pytest.approx(1 / 3)

    def test_singletons_can_be_excluded(self):
        truth = truth_of({"a", "b"}, {"c", "d"}, {"e"})
        comps = [{"a", "b", "c", "d"}, {"e"}]
        with_singletons = cluster_purity(comps, truth, include_singletons=True)
        without = cluster_purity(comps, truth, include_singletons=False)
        assert with_singletons == pytest.approx((4 * (2 / 6) + 1) / 5)
        assert without == pytest.approx(1 / 3)

    def test_no_components_defaults_to_one(self):
        assert cluster_purity([], truth_of({"a"})) == 1.0

    @given(st.data())
    def test_bounds_and_purity_one_iff_subsets(self, data):
        n_groups = data.draw(st.integers(1, 4))
        groups = [
            {f"{g}:{i}" for i in range(data.draw(st.integers(1, 4)))}
            for g in range(n_groups)
        ]
        truth = truth_of(*groups)
        members = sorted(truth.record_ids())
        # random partition of the records into components
        labels = [data.draw(st.integers(0, 3)) for _ in members]
        comps: dict[int, set] = {}
        for rid, label in zip(members, labels):
            comps.setdefault(label, set()).add(rid)
        components = list(comps.values())
        purity = cluster_purity(components, truth)
        assert 0.0 <= purity <= 1.0
        all_subsets = all(
            truth.is_true_match(pair)
            for comp in components
            for pair in combinations(sorted(comp), 2)
        )
        assert (purity == 1.0) == all_subsets


@given(st.data())
def test_completion_never_lowers_recall(data):
    groups = [{f"{g}:{i}" for i in range(data.draw(st.integers(1, 4)))} for g in range(3)]
    truth = truth_of(*groups)
    members = sorted(truth.record_ids())
    pairs = list(combinations(members, 2))
    predicted = {p for p in pairs if data.draw(st.booleans())}
    stage1 = pairwise_scores(predicted, truth)

    # components implied by the predicted edges
    parent = {m: m for m in members}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in predicted:
        parent[find(a)] = find(b)
    comps: dict[str, set] = {}
    for m in members:
        comps.setdefault(find(m), set()).add(m)
    stage2 = group_scores(list(comps.values()), truth, Stage.PRE_CLEANUP)
    assert stage2.recall >= stage1.recall
