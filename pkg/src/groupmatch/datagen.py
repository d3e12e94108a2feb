"""Synthetic multi-source benchmark generation.

Each base seed becomes one entity: its company record is replicated into
every data source (with light per-source naming jitter) together with one
or more securities whose identifiers are consistent across sources. A
random combination of data artifacts is then applied per group, in a fixed
order with independent draws, to recreate the kinds of divergence real
multi-source feeds accumulate: acronym swaps, corporate-term insertions,
acquisitions and mergers, description paraphrases, identifier churn.

Acquisitions unify the ground-truth groups of the two companies involved
(the acquiree's records now describe the acquirer); mergers overwrite
identifiers without touching the ground truth, planting false identifier
overlaps. Generation is single-threaded and fully determined by the seed:
the same parameters always produce byte-identical datasets.
"""

import hashlib
import logging
import math
import random
import string
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .core import (
    CompanyRecord,
    DataError,
    EntityGroup,
    GroundTruth,
    IdScheme,
    Pair,
    RecordId,
    RecordKind,
    SecurityRecord,
    SecurityType,
    canonical_pair,
)
from .corpus import BaseCorpus, CompanySeed, load_base_corpus  # noqa: F401  (re-export)

log = logging.getLogger(__name__)

DEFAULT_ARTIFACT_RATE = 0.15

CORPORATE_TERMS = (
    "Inc.", "Ltd.", "Corp.", "Limited", "Corporation", "Holdings", "Group", "PLC",
)

SPLIT_NAMES = ("train", "val", "test")


class ArtifactKind(str, Enum):
    """Rule-based corruptions, applied per group in declaration order."""

    ACRONYM_NAME = "AcronymName"
    INSERT_CORPORATE_TERM = "InsertCorporateTerm"
    CREATE_CORPORATE_ACQUISITION = "CreateCorporateAcquisition"
    CREATE_CORPORATE_MERGER = "CreateCorporateMerger"
    PARAPHRASE_ATTRIBUTE = "ParaphraseAttribute"
    MULTIPLE_IDS = "MultipleIDs"
    NO_ID_OVERLAPS = "NoIdOverlaps"
    MULTIPLE_SECURITIES = "MultipleSecurities"


def substream(seed: int, *labels: object) -> random.Random:
    """Independent deterministic RNG derived from a root seed and labels.

    Stable across processes and platforms, unlike ``hash()``.
    """
    key = ":".join([str(seed), *map(str, labels)]).encode()
    return random.Random(int.from_bytes(hashlib.sha256(key).digest()[:8], "big"))


@dataclass(frozen=True)
class GenerationParams:
    """Knobs of the generator.

    ``artifact_rates`` maps each artifact to its per-group application
    probability; omitted kinds use ``DEFAULT_ARTIFACT_RATE``. The default
    rates are deliberately arbitrary and meant to be tuned per experiment.
    ``naming_jitter`` is the probability that a source's replica gets a
    benign name variation (punctuation stripped or upper-cased) before any
    artifact runs; set it to 0 for a fully clean dataset.
    """

    num_groups: int
    num_sources: int = 5
    artifact_rates: Mapping[ArtifactKind, float] = field(default_factory=dict)
    rng_seed: int = 0
    securities_per_company: tuple[int, int] = (1, 2)
    naming_jitter: float = 0.15

    def __post_init__(self) -> None:
        if self.num_groups < 1:
            raise ValueError(f"num_groups must be >= 1, got {self.num_groups}")
        if self.num_sources < 2:
            raise ValueError(f"num_sources must be >= 2, got {self.num_sources}")
        for kind, rate in self.artifact_rates.items():
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"artifact rate for {kind.value} outside [0, 1]: {rate}")
        if not 0.0 <= self.naming_jitter <= 1.0:
            raise ValueError(f"naming_jitter outside [0, 1]: {self.naming_jitter}")
        lo, hi = self.securities_per_company
        if lo < 1 or hi < lo:
            raise ValueError(f"bad securities_per_company range: ({lo}, {hi})")

    def rate(self, kind: ArtifactKind) -> float:
        return self.artifact_rates.get(kind, DEFAULT_ARTIFACT_RATE)


def uniform_rates(rate: float) -> dict[ArtifactKind, float]:
    return {kind: rate for kind in ArtifactKind}


@dataclass
class GeneratedDataset:
    companies: list[CompanyRecord]
    securities: list[SecurityRecord]
    company_truth: GroundTruth
    security_truth: GroundTruth
    provenance_log: dict[str, list[dict]]  # generation group token -> artifact entries


# ---------------------------------------------------------------------------
# Mutable generation state. Records are frozen only at assembly time.
# ---------------------------------------------------------------------------


@dataclass
class _CompanyDraft:
    id: RecordId
    source: int
    name: str
    city: str | None
    region: str | None
    country_code: str | None
    description: str | None


@dataclass
class _SecurityDraft:
    id: RecordId
    source: int
    issuer_id: RecordId
    proto: int
    name: str
    security_type: SecurityType
    identifiers: dict[IdScheme, str]


@dataclass
class _Prototype:
    index: int
    name: str
    security_type: SecurityType
    sources: tuple[int, ...]


@dataclass
class GroupState:
    """One entity group under construction, plus cross-group handles."""

    index: int
    token: str
    seed: CompanySeed
    companies: dict[int, _CompanyDraft]
    securities: dict[tuple[int, int], _SecurityDraft]  # (source, proto) -> draft
    prototypes: list[_Prototype]
    log: list[dict]
    ctx: "GeneratorContext"


class _UnionFind:
    def __init__(self):
        self._parent: dict = {}

    def add(self, item) -> None:
        self._parent.setdefault(item, item)

    def find(self, item):
        root = item
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[item] != root:  # path compression
            self._parent[item], item = root, self._parent[item]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        lo, hi = (ra, rb) if ra < rb else (rb, ra)
        self._parent[hi] = lo


@dataclass
class GeneratorContext:
    params: GenerationParams
    groups: list[GroupState] = field(default_factory=list)
    used_ids: dict[IdScheme, set[str]] = field(
        default_factory=lambda: {scheme: set() for scheme in IdScheme}
    )
    company_uf: _UnionFind = field(default_factory=_UnionFind)
    security_uf: _UnionFind = field(default_factory=_UnionFind)

    def mint(self, scheme: IdScheme, rng: random.Random) -> str:
        """Fresh scheme-shaped identifier, globally unique across the dataset."""
        alnum = string.ascii_uppercase + string.digits
        while True:
            if scheme is IdScheme.VALOR:
                value = str(rng.randrange(10**6, 10**9))
            elif scheme is IdScheme.ISIN:
                value = "".join(rng.choices(string.ascii_uppercase, k=2)) + "".join(
                    rng.choices(string.digits, k=10)
                )
            elif scheme is IdScheme.CUSIP:
                value = "".join(rng.choices(alnum, k=9))
            else:  # SEDOL
                value = "".join(rng.choices(alnum, k=7))
            if value not in self.used_ids[scheme]:
                self.used_ids[scheme].add(value)
                return value


# ---------------------------------------------------------------------------
# Text transforms used by the artifacts.
# ---------------------------------------------------------------------------

_PARAPHRASE_STOPWORDS = frozenset({"a", "an", "the", "of", "for", "and", "to", "in"})

_SYNONYMS = {
    "designs": "engineers",
    "builds": "constructs",
    "operates": "runs",
    "develops": "creates",
    "supplies": "provides",
    "maintains": "services",
    "distributes": "ships",
    "manages": "oversees",
    "serves": "supports",
    "regional": "local",
    "commercial": "business",
    "municipal": "city",
    "across": "throughout",
    "independent": "standalone",
    "small": "compact",
}


def acronym_of(name: str) -> str | None:
    """First letters of the whitespace-split words, uppercased.

    Names of fewer than two words have no acronym and return None.
    """
    words = name.split()
    if len(words) < 2:
        return None
    return "".join(word[0] for word in words).upper()


def strip_punctuation(name: str) -> str:
    cleaned = "".join(ch if ch.isalnum() or ch.isspace() else " " for ch in name)
    return " ".join(cleaned.split())


def paraphrase_description(text: str, rng: random.Random) -> str:
    """Deterministic stand-in for a neural paraphraser.

    Reorders comma-separated clauses, drops filler words and swaps from a
    fixed synonym table: the result differs from the input while keeping
    token overlap.
    """
    clauses = [c.strip() for c in text.split(",") if c.strip()]
    if len(clauses) > 1:
        rng.shuffle(clauses)
    rewritten = []
    for clause in clauses:
        words = [
            _SYNONYMS.get(w.lower(), w)
            for w in clause.split()
            if w.lower() not in _PARAPHRASE_STOPWORDS
        ]
        if words:
            rewritten.append(" ".join(words))
    return ", ".join(rewritten) if rewritten else text


# ---------------------------------------------------------------------------
# Artifacts.
# ---------------------------------------------------------------------------


def _pick_sources(rng: random.Random, sources: Iterable[int]) -> list[int]:
    pool = sorted(sources)
    return sorted(rng.sample(pool, rng.randint(1, len(pool))))


def _pick_partner(state: GroupState, rng: random.Random) -> GroupState | None:
    n = len(state.ctx.groups)
    if n < 2:
        return None
    idx = rng.randrange(n - 1)
    if idx >= state.index:
        idx += 1
    return state.ctx.groups[idx]


def _acronym_name(state: GroupState, rng: random.Random) -> dict:
    changed = []
    for src in _pick_sources(rng, state.companies):
        acronym = acronym_of(state.companies[src].name)
        if acronym:
            state.companies[src].name = acronym
            changed.append(src)
    return {"sources": changed, "noop": not changed}


def _insert_corporate_term(state: GroupState, rng: random.Random) -> dict:
    term = rng.choice(CORPORATE_TERMS)
    sources = _pick_sources(rng, state.companies)
    for src in sources:
        state.companies[src].name = f"{state.companies[src].name} {term}"
    return {"sources": sources, "term": term, "noop": False}


def _create_acquisition(state: GroupState, rng: random.Random) -> dict:
    """The group is acquired: some of its records now show the acquirer.

    Affected company records take all the acquirer's attributes and their
    primary security takes the acquirer's primary identifiers. Both the
    company groups and the primary security groups become one ground-truth
    group each.
    """
    acquirer = _pick_partner(state, rng)
    if acquirer is None:
        return {"noop": True, "reason": "no partner group available"}
    sources = _pick_sources(rng, state.companies)
    for src in sources:
        theirs = acquirer.companies[src]
        mine = state.companies[src]
        mine.name = theirs.name
        mine.city = theirs.city
        mine.region = theirs.region
        mine.country_code = theirs.country_code
        mine.description = theirs.description
        state.securities[(src, 0)].identifiers = dict(
            acquirer.securities[(src, 0)].identifiers
        )
    ctx = state.ctx
    ctx.company_uf.union(state.index, acquirer.index)
    ctx.security_uf.union((state.index, 0), (acquirer.index, 0))
    return {"partner": acquirer.token, "sources": sources, "noop": False}


def _create_merger(state: GroupState, rng: random.Random) -> dict:
    """A merger is recorded: identifiers leak from the partner group.

    Some sources overwrite part of the primary security's identifiers with
    the partner's values. Unlike an acquisition this does NOT unify the
    ground-truth groups, so the planted overlaps are false signals.
    """
    partner = _pick_partner(state, rng)
    if partner is None:
        return {"noop": True, "reason": "no partner group available"}
    sources = _pick_sources(rng, state.companies)
    schemes = rng.sample(list(IdScheme), rng.randint(1, len(IdScheme)))
    for src in sources:
        mine = state.securities[(src, 0)]
        theirs = partner.securities[(src, 0)]
        for scheme in schemes:
            if scheme in theirs.identifiers:
                mine.identifiers[scheme] = theirs.identifiers[scheme]
    return {
        "partner": partner.token,
        "sources": sources,
        "schemes": [s.value for s in schemes],
        "noop": False,
    }


def _paraphrase_attribute(state: GroupState, rng: random.Random) -> dict:
    changed = []
    for src in _pick_sources(rng, state.companies):
        description = state.companies[src].description
        if description:
            state.companies[src].description = paraphrase_description(description, rng)
            changed.append(src)
    return {"sources": changed, "noop": not changed}


def _multiple_ids(state: GroupState, rng: random.Random) -> dict:
    proto = rng.randrange(len(state.prototypes))
    keys = sorted(key for key in state.securities if key[1] == proto)
    schemes = sorted(
        {s for key in keys for s in state.securities[key].identifiers},
        key=lambda s: s.value,
    )
    if not schemes:
        return {"noop": True, "reason": "prototype has no identifiers"}
    scheme = rng.choice(schemes)
    value = state.ctx.mint(scheme, rng)
    sources = _pick_sources(rng, (src for src, _ in keys))
    for src in sources:
        state.securities[(src, proto)].identifiers[scheme] = value
    return {"proto": proto, "scheme": scheme.value, "sources": sources, "noop": False}


def _no_id_overlaps(state: GroupState, rng: random.Random) -> dict:
    """Every security record of the group gets fresh, record-private identifiers."""
    for key in sorted(state.securities):
        rec = state.securities[key]
        rec.identifiers = {
            scheme: state.ctx.mint(scheme, rng) for scheme in list(rec.identifiers)
        }
    return {"noop": False}


def _multiple_securities(state: GroupState, rng: random.Random) -> dict:
    added = []
    for _ in range(rng.randint(1, 3)):
        sec_type = rng.choice((SecurityType.RIGHT, SecurityType.BOND, SecurityType.UNIT))
        proto_idx = len(state.prototypes)
        sources = _pick_sources(rng, state.companies)
        identifiers = {scheme: state.ctx.mint(scheme, rng) for scheme in IdScheme}
        name = f"{state.seed.name} {sec_type.value.capitalize()}"
        state.prototypes.append(_Prototype(proto_idx, name, sec_type, tuple(sources)))
        state.ctx.security_uf.add((state.index, proto_idx))
        for src in sources:
            state.securities[(src, proto_idx)] = _SecurityDraft(
                id=f"s{state.index:05d}-{src}-{proto_idx}",
                source=src,
                issuer_id=state.companies[src].id,
                proto=proto_idx,
                name=name,
                security_type=sec_type,
                identifiers=dict(identifiers),
            )
        added.append({"type": sec_type.value, "sources": sources})
    return {"added": added, "noop": False}


_ARTIFACT_FUNCS = {
    ArtifactKind.ACRONYM_NAME: _acronym_name,
    ArtifactKind.INSERT_CORPORATE_TERM: _insert_corporate_term,
    ArtifactKind.CREATE_CORPORATE_ACQUISITION: _create_acquisition,
    ArtifactKind.CREATE_CORPORATE_MERGER: _create_merger,
    ArtifactKind.PARAPHRASE_ATTRIBUTE: _paraphrase_attribute,
    ArtifactKind.MULTIPLE_IDS: _multiple_ids,
    ArtifactKind.NO_ID_OVERLAPS: _no_id_overlaps,
    ArtifactKind.MULTIPLE_SECURITIES: _multiple_securities,
}


def apply_artifact(kind: ArtifactKind, state: GroupState, rng: random.Random) -> dict:
    """Apply one artifact to a group, append and return its log entry."""
    entry = {"kind": kind.value, **_ARTIFACT_FUNCS[kind](state, rng)}
    state.log.append(entry)
    return entry


# ---------------------------------------------------------------------------
# Generation.
# ---------------------------------------------------------------------------


def _build_base_group(index: int, seed_row: CompanySeed, ctx: GeneratorContext) -> GroupState:
    params = ctx.params
    rng = substream(params.rng_seed, "base", index)
    state = GroupState(
        index=index,
        token=f"g{index:05d}",
        seed=seed_row,
        companies={},
        securities={},
        prototypes=[],
        log=[],
        ctx=ctx,
    )
    for src in range(params.num_sources):
        name = seed_row.name
        if rng.random() < params.naming_jitter:
            name = rng.choice((strip_punctuation, str.upper))(name)
        state.companies[src] = _CompanyDraft(
            id=f"c{index:05d}-{src}",
            source=src,
            name=name,
            city=seed_row.city,
            region=seed_row.region,
            country_code=seed_row.country_code,
            description=seed_row.description,
        )
    lo, hi = params.securities_per_company
    for proto_idx in range(rng.randint(lo, hi)):
        sec_type = (
            SecurityType.EQUITY
            if proto_idx == 0
            else rng.choice(list(SecurityType))
        )
        identifiers = {scheme: ctx.mint(scheme, rng) for scheme in IdScheme}
        name = f"{seed_row.name} {sec_type.value.capitalize()}"
        state.prototypes.append(
            _Prototype(proto_idx, name, sec_type, tuple(range(params.num_sources)))
        )
        for src in range(params.num_sources):
            state.securities[(src, proto_idx)] = _SecurityDraft(
                id=f"s{index:05d}-{src}-{proto_idx}",
                source=src,
                issuer_id=state.companies[src].id,
                proto=proto_idx,
                name=name,
                security_type=sec_type,
                identifiers=dict(identifiers),
            )
    ctx.company_uf.add(index)
    for proto in state.prototypes:
        ctx.security_uf.add((index, proto.index))
    return state


def _assemble(ctx: GeneratorContext) -> GeneratedDataset:
    companies = []
    securities = []
    for state in ctx.groups:
        for src in sorted(state.companies):
            draft = state.companies[src]
            companies.append(
                CompanyRecord(
                    draft.id, draft.source, draft.name, draft.city, draft.region,
                    draft.country_code, draft.description,
                )
            )
        for key in sorted(state.securities):
            draft = state.securities[key]
            securities.append(
                SecurityRecord(
                    draft.id, draft.source, draft.issuer_id, draft.name,
                    draft.security_type, dict(draft.identifiers),
                )
            )
    companies.sort(key=lambda r: r.id)
    securities.sort(key=lambda r: r.id)

    company_members: dict[int, list[RecordId]] = {}
    for state in ctx.groups:
        root = ctx.company_uf.find(state.index)
        company_members.setdefault(root, []).extend(
            d.id for d in state.companies.values()
        )
    company_groups = [
        EntityGroup(f"cg{root:05d}", frozenset(ids), RecordKind.COMPANY)
        for root, ids in sorted(company_members.items())
    ]

    security_members: dict[tuple[int, int], list[RecordId]] = {}
    for state in ctx.groups:
        for proto in state.prototypes:
            root = ctx.security_uf.find((state.index, proto.index))
            ids = [
                d.id
                for (src, p), d in state.securities.items()
                if p == proto.index
            ]
            security_members.setdefault(root, []).extend(ids)
    security_groups = [
        EntityGroup(f"sg{gi:05d}-{pi}", frozenset(ids), RecordKind.SECURITY)
        for (gi, pi), ids in sorted(security_members.items())
    ]

    return GeneratedDataset(
        companies=companies,
        securities=securities,
        company_truth=GroundTruth(company_groups),
        security_truth=GroundTruth(security_groups),
        provenance_log={state.token: list(state.log) for state in ctx.groups},
    )


def generate(base: Sequence[CompanySeed], params: GenerationParams) -> GeneratedDataset:
    """Generate the full benchmark from the first ``num_groups`` base seeds."""
    seeds = list(base)
    if len(seeds) < params.num_groups:
        raise DataError(
            f"need at least {params.num_groups} base seeds, corpus has {len(seeds)}"
        )
    ctx = GeneratorContext(params)
    ctx.groups = [
        _build_base_group(i, seeds[i], ctx) for i in range(params.num_groups)
    ]
    for state in ctx.groups:
        rng = substream(params.rng_seed, "artifacts", state.index)
        for kind in ArtifactKind:
            if rng.random() < params.rate(kind):
                apply_artifact(kind, state, rng)
    return _assemble(ctx)


# ---------------------------------------------------------------------------
# Splits and training-pair export.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitAssignment:
    """Group-level split labels: every true pair lives in exactly one split."""

    split_of: Mapping[str, str]  # group_id -> train|val|test

    def groups_for(self, which: str) -> list[str]:
        return sorted(gid for gid, split in self.split_of.items() if split == which)


@dataclass(frozen=True)
class LabeledPair:
    pair: Pair
    is_match: bool

    @property
    def label(self) -> str:
        return "match" if self.is_match else "no_match"


def split_groups(
    truth: GroundTruth,
    ratios: tuple[float, float, float] = (0.6, 0.2, 0.2),
    seed: int = 0,
) -> SplitAssignment:
    """Shuffle groups and slice by cumulative ratio over the group count.

    Train and validation sizes are floored; the remainder goes to test.
    """
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise ValueError(f"ratios must be three non-negative numbers, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")
    group_ids = sorted(g.group_id for g in truth.groups)
    if not group_ids:
        raise ValueError("cannot split an empty ground truth")
    rng = substream(seed, "split")
    rng.shuffle(group_ids)
    n = len(group_ids)
    n_train = math.floor(n * ratios[0])
    n_val = math.floor(n * ratios[1])
    assignment = {}
    for pos, gid in enumerate(group_ids):
        if pos < n_train:
            assignment[gid] = "train"
        elif pos < n_train + n_val:
            assignment[gid] = "val"
        else:
            assignment[gid] = "test"
    return SplitAssignment(assignment)


def export_training_pairs(
    truth: GroundTruth,
    assignment: SplitAssignment,
    which: str,
    neg_ratio: int = 5,
    seed: int = 0,
) -> list[LabeledPair]:
    """All true pairs of one split plus uniformly sampled in-split negatives.

    Negatives never cross split boundaries and never duplicate; when the
    split is too small to supply ``neg_ratio`` negatives per positive, all
    available distinct negatives are emitted with a warning.
    """
    if which not in SPLIT_NAMES:
        raise ValueError(f"unknown split {which!r}")
    if neg_ratio < 0:
        raise ValueError(f"neg_ratio must be >= 0, got {neg_ratio}")
    chosen = {gid for gid, split in assignment.split_of.items() if split == which}
    groups = [g for g in truth.groups if g.group_id in chosen]
    positives: list[Pair] = sorted(
        pair
        for group in groups
        for pair in combinations(sorted(group.member_ids), 2)
    )
    records = sorted({rid for group in groups for rid in group.member_ids})
    true_set = set(positives)
    target = neg_ratio * len(positives)
    max_negatives = len(records) * (len(records) - 1) // 2 - len(positives)
    if target > max_negatives:
        log.warning(
            "split %r can supply only %d of %d requested negatives",
            which, max_negatives, target,
        )
    rng = substream(seed, "negatives", which)
    negatives: list[Pair]
    if target >= max_negatives or 2 * target >= max_negatives:
        all_negatives = sorted(
            pair
            for pair in combinations(records, 2)
            if pair not in true_set
        )
        if target >= max_negatives:
            negatives = all_negatives
        else:
            negatives = sorted(rng.sample(all_negatives, target))
    else:
        sampled: set[Pair] = set()
        while len(sampled) < target:
            i = rng.randrange(len(records))
            j = rng.randrange(len(records))
            if i == j:
                continue
            pair = canonical_pair(records[i], records[j])
            if pair not in true_set:
                sampled.add(pair)
        negatives = sorted(sampled)
    return [LabeledPair(p, True) for p in positives] + [
        LabeledPair(p, False) for p in negatives
    ]
