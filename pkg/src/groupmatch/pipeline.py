"""End-to-end orchestration: block, match, clean up, complete, score.

The stages hand off plain values, so any of them can be swapped for file
input (e.g. externally computed predictions) without the rest noticing.
"""

import logging
from dataclasses import dataclass, field
from typing import Collection, Sequence

from . import blocking as bl
from .blocking import BlockingKind, CandidatePair
from .core import (
    CompanyRecord,
    DataError,
    GroundTruth,
    Pair,
    RecordId,
    RecordKind,
    SecurityRecord,
    validate_issuers,
)
from .graph import (
    CleanupParams,
    CleanupResult,
    Component,
    build_graph,
    connected_components,
    graph_cleanup,
    pre_cleanup,
)
from .matcher import MatcherSpec, Prediction, group_by_issuer, predict_all
from .metrics import Stage, StageScores, group_scores, pairwise_scores

log = logging.getLogger(__name__)


@dataclass
class PipelineResult:
    candidates: list[CandidatePair]
    predictions: list[Prediction]
    raw_components: list[Component]
    cleanup: CleanupResult
    removed: list[tuple[Pair, str]]  # pre-cleanup and cleanup removals, in order
    scores: list[StageScores] = field(default_factory=list)

    @property
    def components(self) -> list[Component]:
        return self.cleanup.components


def compute_candidates(
    kind: RecordKind,
    blockings: Sequence[BlockingKind],
    companies: Sequence[CompanyRecord] | None = None,
    securities: Sequence[SecurityRecord] | None = None,
    company_groups: Sequence[Collection[RecordId]] | None = None,
    token_top_n: int = 5,
) -> list[CandidatePair]:
    """Run the requested blockings for one dataset kind and merge the results."""
    if not blockings:
        raise ValueError("at least one blocking is required")
    lists = []
    for kind_of_blocking in blockings:
        if kind is RecordKind.COMPANY:
            if companies is None:
                raise DataError("blocking stage: companies table is required")
            if kind_of_blocking is BlockingKind.ID_OVERLAP:
                if securities is None:
                    log.warning(
                        "blocking stage: no securities table, skipping IdOverlap "
                        "for companies"
                    )
                    continue
                lists.append(bl.id_overlap_companies(companies, securities))
            elif kind_of_blocking is BlockingKind.TOKEN_OVERLAP:
                lists.append(bl.token_overlap(companies, token_top_n))
            else:
                raise DataError(
                    "blocking stage: IssuerMatch applies to securities only"
                )
        else:
            if securities is None:
                raise DataError("blocking stage: securities table is required")
            if kind_of_blocking is BlockingKind.ID_OVERLAP:
                lists.append(bl.id_overlap_securities(securities))
            elif kind_of_blocking is BlockingKind.TOKEN_OVERLAP:
                lists.append(bl.token_overlap(securities, token_top_n))
            else:
                if company_groups is None:
                    raise DataError(
                        "blocking stage: IssuerMatch needs a company groups file"
                    )
                lists.append(bl.issuer_match(securities, company_groups))
    return bl.merge_candidates(*lists)


def run_pipeline(
    kind: RecordKind,
    blockings: Sequence[BlockingKind],
    matcher_spec: MatcherSpec,
    cleanup_params: CleanupParams,
    companies: Sequence[CompanyRecord] | None = None,
    securities: Sequence[SecurityRecord] | None = None,
    company_groups: Sequence[Collection[RecordId]] | None = None,
    token_top_n: int = 5,
    truth: GroundTruth | None = None,
    workers: int = 1,
    predictions: Sequence[Prediction] | None = None,
) -> PipelineResult:
    """Full run over in-memory tables; pass ``predictions`` to skip matching.

    When ``truth`` is given, scores for all three stages are attached:
    pairwise over the positive predictions, then group scores over the
    completed components before and after cleanup. Token-overlap edges in
    very large components are pre-dropped for company runs only, since that
    is the only configuration that produces them at scale.
    """
    target = companies if kind is RecordKind.COMPANY else securities
    if target is None:
        raise DataError(f"pipeline: no {kind.value} table provided")
    if kind is RecordKind.SECURITY and companies is not None:
        validate_issuers(companies, securities or [])

    candidates = compute_candidates(
        kind, blockings, companies, securities, company_groups, token_top_n
    )
    if predictions is None:
        records_by_id = {rec.id: rec for rec in target}
        securities_by_issuer = (
            group_by_issuer(securities)
            if kind is RecordKind.COMPANY and securities is not None
            else None
        )
        predictions = predict_all(
            candidates, records_by_id, matcher_spec, securities_by_issuer, workers
        )

    all_ids = [rec.id for rec in target]
    try:
        graph = build_graph(predictions, all_ids)
    except KeyError as exc:
        raise DataError(f"graph stage: {exc.args[0]}") from None
    raw_components = connected_components(graph)

    apply_precleanup = (
        kind is RecordKind.COMPANY and BlockingKind.TOKEN_OVERLAP in blockings
    )
    removed: list[tuple[Pair, str]] = []
    if apply_precleanup:
        graph, dropped = pre_cleanup(graph, cleanup_params.pre_cleanup_limit)
        removed.extend((edge, "precleanup") for edge in dropped)
    cleanup = graph_cleanup(graph, cleanup_params, workers=workers)
    removed.extend(cleanup.removed)

    scores: list[StageScores] = []
    if truth is not None:
        positive = {p.pair for p in predictions if p.is_match}
        scores.append(pairwise_scores(positive, truth))
        scores.append(
            group_scores([c.nodes for c in raw_components], truth, Stage.PRE_CLEANUP)
        )
        scores.append(
            group_scores(
                [c.nodes for c in cleanup.components], truth, Stage.POST_CLEANUP
            )
        )
    return PipelineResult(
        candidates=list(candidates),
        predictions=list(predictions),
        raw_components=raw_components,
        cleanup=cleanup,
        removed=removed,
        scores=scores,
    )
