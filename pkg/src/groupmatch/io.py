"""CSV/JSON readers and writers for every stage handoff file.

All files are UTF-8 with a header row; empty cells load as absent (None),
never as empty strings. Writers are deterministic: rows are emitted in a
stable order and no timestamps are embedded, so identical inputs produce
byte-identical files.
"""

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

from .blocking import BlockingKind, CandidatePair
from .core import (
    CompanyRecord,
    EntityGroup,
    GroundTruth,
    IdScheme,
    Pair,
    ParseError,
    RecordKind,
    SecurityRecord,
    SecurityType,
    canonical_pair,
)
from .datagen import SPLIT_NAMES, LabeledPair, SplitAssignment
from .matcher import Prediction
from .metrics import StageScores

PathLike = str | Path

COMPANY_COLUMNS = ("id", "source", "name", "city", "region", "country_code", "description")
SECURITY_COLUMNS = ("id", "source", "issuer_id", "name", "security_type",
                    "isin", "cusip", "valor", "sedol")


def _opt(value: str | None) -> str:
    return value if value is not None else ""


def write_companies_csv(path: PathLike, companies: Iterable[CompanyRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(COMPANY_COLUMNS)
        for rec in companies:
            writer.writerow([
                rec.id, rec.source, rec.name, _opt(rec.city), _opt(rec.region),
                _opt(rec.country_code), _opt(rec.description),
            ])


def read_companies_csv(path: PathLike) -> list[CompanyRecord]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            try:
                out.append(CompanyRecord(
                    id=row["id"],
                    source=int(row["source"]),
                    name=row["name"],
                    city=row["city"] or None,
                    region=row["region"] or None,
                    country_code=row["country_code"] or None,
                    description=row["description"] or None,
                ))
            except (KeyError, ValueError, TypeError) as exc:
                raise ParseError(f"{path} line {lineno}: {exc}") from None
    return out


def write_securities_csv(path: PathLike, securities: Iterable[SecurityRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SECURITY_COLUMNS)
        for rec in securities:
            ids = rec.identifiers
            writer.writerow([
                rec.id, rec.source, rec.issuer_id, rec.name, rec.security_type.value,
                ids.get(IdScheme.ISIN, ""), ids.get(IdScheme.CUSIP, ""),
                ids.get(IdScheme.VALOR, ""), ids.get(IdScheme.SEDOL, ""),
            ])


def read_securities_csv(path: PathLike) -> list[SecurityRecord]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            try:
                identifiers = {
                    scheme: row[scheme.value]
                    for scheme in IdScheme
                    if row.get(scheme.value)
                }
                out.append(SecurityRecord(
                    id=row["id"],
                    source=int(row["source"]),
                    issuer_id=row["issuer_id"],
                    name=row["name"],
                    security_type=SecurityType(row["security_type"]),
                    identifiers=identifiers,
                ))
            except (KeyError, ValueError, TypeError) as exc:
                raise ParseError(f"{path} line {lineno}: {exc}") from None
    return out


def write_groups_csv(path: PathLike, groups: Iterable[EntityGroup]) -> None:
    """Groups file (group_id, record_id), rows sorted for reproducibility."""
    rows = sorted(
        (group.group_id, rid) for group in groups for rid in group.member_ids
    )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("group_id", "record_id"))
        writer.writerows(rows)


def read_groups_csv(path: PathLike, kind: RecordKind) -> GroundTruth:
    members: dict[str, set[str]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            group_id, record_id = row.get("group_id"), row.get("record_id")
            if not group_id or not record_id:
                raise ParseError(f"{path} line {lineno}: needs group_id and record_id")
            members.setdefault(group_id, set()).add(record_id)
    groups = [
        EntityGroup(gid, frozenset(ids), kind) for gid, ids in sorted(members.items())
    ]
    return GroundTruth(groups)


def components_to_groups(
    components: Iterable[Iterable[str]], kind: RecordKind
) -> list[EntityGroup]:
    """Entity groups from output components; group_id is the smallest member id."""
    out = []
    for comp in components:
        members = sorted(comp)
        out.append(EntityGroup(members[0], frozenset(members), kind))
    return sorted(out, key=lambda g: g.group_id)


def write_splits_csv(path: PathLike, assignment: SplitAssignment) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("group_id", "split"))
        writer.writerows(sorted(assignment.split_of.items()))


def read_splits_csv(path: PathLike) -> SplitAssignment:
    split_of = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            try:
                if row["split"] not in SPLIT_NAMES:
                    raise ValueError(f"unknown split {row['split']!r}")
                split_of[row["group_id"]] = row["split"]
            except (KeyError, ValueError) as exc:
                raise ParseError(f"{path} line {lineno}: {exc}") from None
    return SplitAssignment(split_of)


def write_pairs_csv(path: PathLike, pairs: Sequence[LabeledPair]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("id_a", "id_b", "label"))
        for lp in pairs:
            writer.writerow((lp.pair[0], lp.pair[1], lp.label))


def read_pairs_csv(path: PathLike) -> list[LabeledPair]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            try:
                if row["label"] not in ("match", "no_match"):
                    raise ValueError(f"unknown label {row['label']!r}")
                out.append(LabeledPair(
                    canonical_pair(row["id_a"], row["id_b"]), row["label"] == "match"
                ))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{path} line {lineno}: {exc}") from None
    return out


def write_candidates_csv(path: PathLike, candidates: Iterable[CandidatePair]) -> None:
    """Candidates file; provenance is a +-joined blocking list, e.g. IdOverlap+TokenOverlap."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("id_a", "id_b", "provenance"))
        for cand in candidates:
            provenance = "+".join(sorted(kind.value for kind in cand.provenance))
            writer.writerow((cand.pair[0], cand.pair[1], provenance))


def read_candidates_csv(path: PathLike) -> list[CandidatePair]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            try:
                provenance = frozenset(
                    BlockingKind(part) for part in row["provenance"].split("+") if part
                )
                out.append(CandidatePair(
                    canonical_pair(row["id_a"], row["id_b"]), provenance
                ))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{path} line {lineno}: {exc}") from None
    return out


def write_predictions_csv(path: PathLike, predictions: Iterable[Prediction]) -> None:
    """Predictions file (id_a, id_b, score, label); also the external import format."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("id_a", "id_b", "score", "label"))
        for pred in predictions:
            writer.writerow((
                pred.pair[0], pred.pair[1], f"{pred.score:.6f}", pred.label
            ))


def read_predictions_csv(path: PathLike) -> list[Prediction]:
    """Read a predictions file stand-alone (no candidate join, empty provenance)."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for lineno, row in enumerate(reader, start=2):
            try:
                score = float(row["score"])
                label = row.get("label") or ("match" if score >= 0.5 else "no_match")
                if label not in ("match", "no_match"):
                    raise ValueError(f"unknown label {label!r}")
                out.append(Prediction(
                    canonical_pair(row["id_a"], row["id_b"]), label == "match", score
                ))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{path} line {lineno}: {exc}") from None
    return out


def write_provenance_jsonl(path: PathLike, provenance_log: dict[str, list[dict]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for group_id, artifacts in provenance_log.items():
            fh.write(json.dumps(
                {"group_id": group_id, "artifacts": artifacts}, sort_keys=True
            ))
            fh.write("\n")


def read_provenance_jsonl(path: PathLike) -> dict[str, list[dict]]:
    out: dict[str, list[dict]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                out[entry["group_id"]] = entry["artifacts"]
            except (KeyError, ValueError) as exc:
                raise ParseError(f"{path} line {lineno}: {exc}") from None
    return out


def write_audit_jsonl(path: PathLike, removed: Iterable[tuple[Pair, str]]) -> None:
    """Cleanup audit log: one removed edge per line with its removal phase."""
    with open(path, "w", encoding="utf-8") as fh:
        for (id_a, id_b), phase in removed:
            fh.write(json.dumps(
                {"id_a": id_a, "id_b": id_b, "phase": phase}, sort_keys=True
            ))
            fh.write("\n")


def write_metrics_json(path: PathLike, scores: Sequence[StageScores]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"stages": [s.as_dict() for s in scores]}, fh, indent=2, sort_keys=True)
        fh.write("\n")
