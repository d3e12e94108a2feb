"""Candidate-pair generation.

Three blockings produce candidate pairs across data sources: identifier
overlap, token overlap via an inverted index, and issuer match for
securities whose issuing companies were matched in a previous run. Each
candidate carries the set of blockings that produced it; downstream cleanup
uses that provenance.
"""

import logging
import re
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Collection, Iterable, Sequence

from .core import (
    CompanyRecord,
    IdScheme,
    Pair,
    Record,
    RecordId,
    ReferentialIntegrityError,
    SecurityRecord,
    canonical_pair,
)

log = logging.getLogger(__name__)


class BlockingKind(str, Enum):
    ID_OVERLAP = "IdOverlap"
    TOKEN_OVERLAP = "TokenOverlap"
    ISSUER_MATCH = "IssuerMatch"


@dataclass(frozen=True)
class CandidatePair:
    """A canonical record-id pair plus the blockings that produced it."""

    pair: Pair
    provenance: frozenset[BlockingKind]


_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Corporate boilerplate that would otherwise dominate overlap counts.
STOPWORDS = frozenset({"inc", "ltd", "corp", "co", "plc", "the"})


def tokenize(text: str) -> set[str]:
    """Lowercased alphanumeric runs, minus one-char tokens and stopwords."""
    return {
        t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= 2 and t not in STOPWORDS
    }


def record_text(record: Record) -> str:
    """Concatenated textual attributes used by the token-overlap blocking."""
    parts = [record.name]
    for attr in ("city", "region", "country_code", "description"):
        value = getattr(record, attr, None)
        if value:
            parts.append(value)
    return " ".join(parts)


def id_overlap_securities(securities: Iterable[SecurityRecord]) -> list[CandidatePair]:
    """Pairs of cross-source securities sharing an identifier value.

    Equality is scheme-scoped: an ISIN never matches a CUSIP, even if the
    strings happen to coincide.
    """
    buckets: dict[tuple[IdScheme, str], list[SecurityRecord]] = defaultdict(list)
    for rec in securities:
        for scheme, value in rec.identifiers.items():
            buckets[(scheme, value)].append(rec)
    pairs: set[Pair] = set()
    for bucket in buckets.values():
        for a, b in combinations(bucket, 2):
            if a.source != b.source:
                pairs.add(canonical_pair(a.id, b.id))
    provenance = frozenset({BlockingKind.ID_OVERLAP})
    return [CandidatePair(p, provenance) for p in sorted(pairs)]


def id_overlap_companies(
    companies: Iterable[CompanyRecord], securities: Iterable[SecurityRecord]
) -> list[CandidatePair]:
    """Pairs of cross-source companies whose issued securities share an identifier."""
    source_of = {c.id: c.source for c in companies}
    buckets: dict[tuple[IdScheme, str], set[RecordId]] = defaultdict(set)
    for sec in securities:
        if sec.issuer_id not in source_of:
            raise ReferentialIntegrityError(
                f"security {sec.id!r} references unknown issuer {sec.issuer_id!r}"
            )
        for scheme, value in sec.identifiers.items():
            buckets[(scheme, value)].add(sec.issuer_id)
    pairs: set[Pair] = set()
    for issuers in buckets.values():
        for a, b in combinations(sorted(issuers), 2):
            if source_of[a] != source_of[b]:
                pairs.add(canonical_pair(a, b))
    provenance = frozenset({BlockingKind.ID_OVERLAP})
    return [CandidatePair(p, provenance) for p in sorted(pairs)]


def token_overlap(records: Sequence[Record], n: int = 5) -> list[CandidatePair]:
    """For each record, its top-n cross-source partners by token overlap.

    Partners are ranked by intersection size of token sets over the
    concatenated textual attributes; ties prefer the smaller record id, and
    zero-overlap partners are never emitted. A pair is kept if either
    endpoint selected it.
    """
    if n < 1:
        raise ValueError(f"token_overlap requires n >= 1, got {n}")
    ordered = sorted(records, key=lambda r: r.id)
    tokens = {r.id: tokenize(record_text(r)) for r in ordered}
    source = {r.id: r.source for r in ordered}
    postings: dict[str, list[RecordId]] = defaultdict(list)
    for rec in ordered:  # posting lists sorted by record id
        for tok in tokens[rec.id]:
            postings[tok].append(rec.id)

    selected: set[Pair] = set()
    for rec in ordered:
        rid = rec.id
        counts: dict[RecordId, int] = defaultdict(int)
        for tok in tokens[rid]:
            for other in postings[tok]:
                if other != rid and source[other] != source[rid]:
                    counts[other] += 1
        if not counts:
            continue
        top = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:n]
        for other, _ in top:
            selected.add(canonical_pair(rid, other))
    provenance = frozenset({BlockingKind.TOKEN_OVERLAP})
    return [CandidatePair(p, provenance) for p in sorted(selected)]


def issuer_match(
    securities: Iterable[SecurityRecord], company_groups: Iterable[Collection[RecordId]]
) -> list[CandidatePair]:
    """Pairs of cross-source securities whose issuers sit in the same company group.

    Securities whose issuer is outside every group are skipped (and counted
    in the debug log); the typical input is the group output of a previous
    company matching run, which need not cover every issuer.
    """
    group_of: dict[RecordId, int] = {}
    for idx, group in enumerate(company_groups):
        for cid in group:
            group_of[cid] = idx
    grouped: dict[int, list[SecurityRecord]] = defaultdict(list)
    skipped = 0
    for sec in securities:
        idx = group_of.get(sec.issuer_id)
        if idx is None:
            skipped += 1
            continue
        grouped[idx].append(sec)
    if skipped:
        log.debug("issuer_match: %d securities with issuer outside every group", skipped)
    pairs: set[Pair] = set()
    for bucket in grouped.values():
        for a, b in combinations(bucket, 2):
            if a.source != b.source:
                pairs.add(canonical_pair(a.id, b.id))
    provenance = frozenset({BlockingKind.ISSUER_MATCH})
    return [CandidatePair(p, provenance) for p in sorted(pairs)]


def merge_candidates(*candidate_lists: Iterable[CandidatePair]) -> list[CandidatePair]:
    """Union of candidate lists: provenance sets merged, output sorted by pair."""
    merged: dict[Pair, frozenset[BlockingKind]] = {}
    for candidates in candidate_lists:
        for cand in candidates:
            merged[cand.pair] = merged.get(cand.pair, frozenset()) | cand.provenance
    return [CandidatePair(pair, prov) for pair, prov in sorted(merged.items())]
