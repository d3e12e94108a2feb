"""Evaluation against ground truth at the three pipeline stages.

Stage scores are plain precision/recall/F1 over pair sets. The pairwise
stage evaluates the positively predicted pairs as-is; the two group stages
first complete every component into a clique, so they also report the
cluster purity of the grouping. Recall always uses the full true-pair set
of the evaluated record universe, which is why blocking misses depress it.
"""

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Collection, Iterable

from .core import GroundTruth, Pair, RecordId


class Stage(str, Enum):
    PAIRWISE = "pairwise"
    PRE_CLEANUP = "pre_cleanup"
    POST_CLEANUP = "post_cleanup"


@dataclass(frozen=True)
class StageScores:
    stage: Stage
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    cluster_purity: float | None = None
    n_components: int | None = None
    max_component_size: int | None = None

    def as_dict(self) -> dict:
        return {
            "stage": self.stage.value,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "cluster_purity": self.cluster_purity,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "n_components": self.n_components,
            "max_component_size": self.max_component_size,
        }


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    # 0-denominator cases score 0 by convention; tp/fp/fn are reported so
    # consumers can apply their own.
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def pairwise_scores(
    predicted_positive: Iterable[Pair],
    truth: GroundTruth,
    stage: Stage = Stage.PAIRWISE,
) -> StageScores:
    predicted = set(predicted_positive)
    true = truth.true_pairs()
    tp = len(predicted & true)
    fp = len(predicted - true)
    fn = len(true - predicted)
    precision, recall, f1 = _prf(tp, fp, fn)
    return StageScores(stage, precision, recall, f1, tp, fp, fn)


def weighted_purity(
    parts: Iterable[tuple[int, int]], include_singletons: bool = True
) -> float:
    """Size-weighted purity from (component size, true-pair count) parts.

    A component of k nodes treated as a complete graph asserts k*(k-1)/2
    matches; its purity is the fraction of those that are true, weighted by
    k in the average. Singletons assert nothing wrong and count as purity 1
    (or are dropped entirely with ``include_singletons=False``).
    """
    weighted = 0.0
    total = 0
    for size, n_true in parts:
        if size == 1:
            if include_singletons:
                weighted += 1.0
                total += 1
            continue
        n_pairs = size * (size - 1) // 2
        weighted += size * (n_true / n_pairs)
        total += size
    return weighted / total if total else 1.0


def cluster_purity(
    components: Iterable[Collection[RecordId]],
    truth: GroundTruth,
    include_singletons: bool = True,
) -> float:
    """Size-weighted average fraction of true pairs within each component."""
    parts = []
    for comp in components:
        members = sorted(comp)
        n_true = sum(1 for pair in combinations(members, 2) if truth.is_true_match(pair))
        parts.append((len(members), n_true))
    return weighted_purity(parts, include_singletons)


def group_scores(
    components: Iterable[Collection[RecordId]],
    truth: GroundTruth,
    stage: Stage,
    include_singletons: bool = True,
) -> StageScores:
    """Pair metrics over the transitive completion of a grouping, plus purity."""
    comps = [sorted(c) for c in components]
    completed: set[Pair] = set()
    for members in comps:
        completed.update(combinations(members, 2))
    base = pairwise_scores(completed, truth, stage)
    purity = cluster_purity(comps, truth, include_singletons)
    return StageScores(
        stage,
        base.precision,
        base.recall,
        base.f1,
        base.tp,
        base.fp,
        base.fn,
        cluster_purity=purity,
        n_components=len(comps),
        max_component_size=max((len(c) for c in comps), default=0),
    )
