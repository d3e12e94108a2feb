"""Pairwise matching over candidate pairs.

Two deterministic built-in matchers (identifier equality with a name
fallback, and name token Jaccard) plus an import path for predictions
computed elsewhere, e.g. by a fine-tuned language model. All matchers emit
the same Prediction shape, so the rest of the pipeline does not care where
the scores came from.
"""

import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .blocking import BlockingKind, CandidatePair, tokenize
from .core import (
    CompanyRecord,
    Pair,
    ParseError,
    Record,
    RecordId,
    SecurityRecord,
    canonical_pair,
)

log = logging.getLogger(__name__)


class MatcherKind(str, Enum):
    EXACT_ID = "exact-id"
    NAME_JACCARD = "name-jaccard"
    EXTERNAL = "external"


@dataclass(frozen=True)
class MatcherSpec:
    kind: MatcherKind
    threshold: float = 0.5
    predictions_path: str | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")
        if (self.kind is MatcherKind.EXTERNAL) != (self.predictions_path is not None):
            raise ValueError("predictions_path is set iff the matcher is external")

    @classmethod
    def exact_id(cls, threshold: float = 0.5) -> "MatcherSpec":
        return cls(MatcherKind.EXACT_ID, threshold=threshold)

    @classmethod
    def name_jaccard(cls, threshold: float = 0.5) -> "MatcherSpec":
        return cls(MatcherKind.NAME_JACCARD, threshold=threshold)

    @classmethod
    def external(cls, predictions_path: str) -> "MatcherSpec":
        return cls(MatcherKind.EXTERNAL, predictions_path=str(predictions_path))


@dataclass(frozen=True)
class Prediction:
    pair: Pair
    is_match: bool
    score: float
    provenance: frozenset[BlockingKind] = frozenset()

    @property
    def label(self) -> str:
        return "match" if self.is_match else "no_match"


def name_jaccard(a: str, b: str) -> float:
    """Jaccard similarity of name token sets; empty names score 0."""
    ta, tb = tokenize(a), tokenize(b)
    if not ta or not tb:
        return 0.0
    return len(ta & tb) / len(ta | tb)


def _identifiers_overlap(a: SecurityRecord, b: SecurityRecord) -> bool:
    return any(
        scheme in b.identifiers and b.identifiers[scheme] == value
        for scheme, value in a.identifiers.items()
    )


def _issued_id_set(
    company: CompanyRecord,
    securities_by_issuer: Mapping[RecordId, Sequence[SecurityRecord]],
) -> set[tuple]:
    issued = securities_by_issuer.get(company.id, ())
    return {(s, v) for sec in issued for s, v in sec.identifiers.items()}


def score_pair(
    spec: MatcherSpec,
    a: Record,
    b: Record,
    securities_by_issuer: Mapping[RecordId, Sequence[SecurityRecord]] | None = None,
) -> float:
    """Score two records of the same kind with a built-in matcher.

    The exact-id matcher returns 1.0 on a scheme-scoped identifier hit
    (direct for securities, via issued securities for companies) and falls
    back to name Jaccard otherwise. Company identifier lookups need
    ``securities_by_issuer``; without it companies are scored by name only.
    """
    if type(a) is not type(b):
        raise TypeError(
            f"cannot score a {type(a).__name__} against a {type(b).__name__}"
        )
    if spec.kind is MatcherKind.NAME_JACCARD:
        return name_jaccard(a.name, b.name)
    if spec.kind is MatcherKind.EXACT_ID:
        if isinstance(a, SecurityRecord):
            if _identifiers_overlap(a, b):
                return 1.0
        elif securities_by_issuer is not None:
            ids_a = _issued_id_set(a, securities_by_issuer)
            ids_b = _issued_id_set(b, securities_by_issuer)
            if ids_a & ids_b:
                return 1.0
        return name_jaccard(a.name, b.name)
    raise ValueError("external matchers are scored via import_predictions")


def group_by_issuer(
    securities: Iterable[SecurityRecord],
) -> dict[RecordId, list[SecurityRecord]]:
    out: dict[RecordId, list[SecurityRecord]] = {}
    for sec in securities:
        out.setdefault(sec.issuer_id, []).append(sec)
    return out


def predict_all(
    candidates: Sequence[CandidatePair],
    records_by_id: Mapping[RecordId, Record],
    spec: MatcherSpec,
    securities_by_issuer: Mapping[RecordId, Sequence[SecurityRecord]] | None = None,
    workers: int = 1,
) -> list[Prediction]:
    """One prediction per candidate, in candidate order.

    External specs delegate to :func:`import_predictions`. Scoring is pure,
    so batches may run on several workers; the output order is always the
    candidate order regardless of worker count.
    """
    if spec.kind is MatcherKind.EXTERNAL:
        assert spec.predictions_path is not None
        return import_predictions(spec.predictions_path, candidates).predictions

    def score_batch(batch: Sequence[CandidatePair]) -> list[Prediction]:
        out = []
        for cand in batch:
            id_a, id_b = cand.pair
            try:
                a, b = records_by_id[id_a], records_by_id[id_b]
            except KeyError as exc:
                raise KeyError(f"candidate references unknown record id {exc.args[0]!r}") from None
            score = score_pair(spec, a, b, securities_by_issuer)
            out.append(Prediction(cand.pair, score >= spec.threshold, score, cand.provenance))
        return out

    if workers <= 1 or len(candidates) < 2 * workers:
        return score_batch(candidates)
    chunk = (len(candidates) + workers - 1) // workers
    batches = [candidates[i : i + chunk] for i in range(0, len(candidates), chunk)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(score_batch, batches))
    return [pred for batch in results for pred in batch]


@dataclass(frozen=True)
class ImportResult:
    predictions: list[Prediction]
    n_defaulted: int  # candidates with no row in the file, emitted as no_match
    n_unknown_provenance: int  # file rows outside the candidate set, kept


def import_predictions(path: str, candidates: Sequence[CandidatePair]) -> ImportResult:
    """Join a predictions CSV (id_a, id_b, score[, label]) onto candidates.

    Row pairs are canonicalized, so a reversed (b, a) row matches the
    candidate (a, b). An explicit label column wins over the score; with
    scores only, score >= 0.5 maps to match. Candidates missing from the
    file default to no_match with score 0; file rows outside the candidate
    set are kept with empty provenance.
    """
    rows: dict[Pair, tuple[float, bool]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        if "id_a" not in fields or "id_b" not in fields or "score" not in fields:
            raise ParseError(f"{path}: header must contain id_a, id_b, score")
        has_label = "label" in fields
        for lineno, row in enumerate(reader, start=2):
            try:
                pair = canonical_pair(row["id_a"], row["id_b"])
                score = float(row["score"])
            except (ValueError, TypeError) as exc:
                raise ParseError(f"{path} line {lineno}: {exc}") from None
            if not 0.0 <= score <= 1.0:
                raise ParseError(f"{path} line {lineno}: score {score} outside [0, 1]")
            if has_label and row["label"]:
                if row["label"] not in ("match", "no_match"):
                    raise ParseError(
                        f"{path} line {lineno}: label must be match or no_match, "
                        f"got {row['label']!r}"
                    )
                is_match = row["label"] == "match"
            else:
                is_match = score >= 0.5
            prev = rows.get(pair)
            if prev is None or score > prev[0]:
                rows[pair] = (score, is_match)

    predictions: list[Prediction] = []
    defaulted = 0
    seen: set[Pair] = set()
    for cand in candidates:
        seen.add(cand.pair)
        entry = rows.get(cand.pair)
        if entry is None:
            defaulted += 1
            predictions.append(Prediction(cand.pair, False, 0.0, cand.provenance))
        else:
            score, is_match = entry
            predictions.append(Prediction(cand.pair, is_match, score, cand.provenance))
    extras = sorted(pair for pair in rows if pair not in seen)
    for pair in extras:
        score, is_match = rows[pair]
        predictions.append(Prediction(pair, is_match, score, frozenset()))
    if defaulted:
        log.warning("%d candidates had no prediction row; defaulted to no_match", defaulted)
    if extras:
        log.info("%d prediction rows were outside the candidate set", len(extras))
    return ImportResult(predictions, defaulted, len(extras))
