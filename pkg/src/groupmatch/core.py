"""Shared domain types: records, identifier schemes, and ground-truth groups.

Everything here is immutable after construction and safe to share across
workers. Record pairs are always stored in canonical (sorted) order so that
(a, b) and (b, a) compare and hash equal.
"""

from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterable, Mapping

RecordId = str
DataSourceId = int
Pair = tuple[RecordId, RecordId]


class DataError(Exception):
    """Bad input data: malformed files, broken references, invalid groups."""


class PartitionError(DataError):
    """A record id appears in more than one ground-truth group."""


class ReferentialIntegrityError(DataError):
    """A record references an id that does not exist."""


class ParseError(DataError):
    """A data file row could not be parsed; message carries the line number."""


def canonical_pair(a: RecordId, b: RecordId) -> Pair:
    """Order-independent pair key: (a, b) and (b, a) map to the same tuple."""
    if a == b:
        raise ValueError(f"pair endpoints must differ, got {a!r} twice")
    return (a, b) if a < b else (b, a)


class RecordKind(str, Enum):
    COMPANY = "company"
    SECURITY = "security"


class SecurityType(str, Enum):
    EQUITY = "equity"
    RIGHT = "right"
    BOND = "bond"
    UNIT = "unit"
    OTHER = "other"


class IdScheme(str, Enum):
    ISIN = "isin"
    CUSIP = "cusip"
    VALOR = "valor"
    SEDOL = "sedol"


# Fixed-length alphanumeric schemes; VALOR is any run of decimal digits.
_SCHEME_LENGTHS = {IdScheme.ISIN: 12, IdScheme.CUSIP: 9, IdScheme.SEDOL: 7}


def identifier_shape_ok(scheme: IdScheme, value: str) -> bool:
    """Shape check only; checksum digits are deliberately not validated."""
    if not value.isascii():
        return False
    if scheme is IdScheme.VALOR:
        return value.isdigit()
    return len(value) == _SCHEME_LENGTHS[scheme] and value.isalnum()


@dataclass(frozen=True)
class CompanyRecord:
    id: RecordId
    source: DataSourceId
    name: str
    city: str | None = None
    region: str | None = None
    country_code: str | None = None
    description: str | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError(f"company {self.id!r} has an empty name")


@dataclass(frozen=True)
class SecurityRecord:
    id: RecordId
    source: DataSourceId
    issuer_id: RecordId
    name: str
    security_type: SecurityType = SecurityType.EQUITY
    identifiers: Mapping[IdScheme, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError(f"security {self.id!r} has an empty name")
        object.__setattr__(self, "identifiers", dict(self.identifiers))
        for scheme, value in self.identifiers.items():
            if not identifier_shape_ok(scheme, value):
                raise ValueError(
                    f"security {self.id!r}: {value!r} is not a valid {scheme.name}"
                )


Record = CompanyRecord | SecurityRecord


@dataclass(frozen=True)
class EntityGroup:
    """A ground-truth set of record ids representing one real-world entity."""

    group_id: str
    member_ids: frozenset[RecordId]
    kind: RecordKind

    def __post_init__(self) -> None:
        if not self.member_ids:
            raise ValueError(f"group {self.group_id!r} has no members")


class GroundTruth:
    """Partition of a record set into entity groups, with a pair-level view.

    Groups must not overlap; construction raises :class:`PartitionError`
    naming the first record id found in two groups.
    """

    def __init__(self, groups: Iterable[EntityGroup]):
        self.groups: list[EntityGroup] = list(groups)
        self._group_of: dict[RecordId, str] = {}
        for group in self.groups:
            for rid in group.member_ids:
                if rid in self._group_of:
                    raise PartitionError(
                        f"record {rid!r} appears in group {self._group_of[rid]!r} "
                        f"and group {group.group_id!r}"
                    )
                self._group_of[rid] = group.group_id

    def __len__(self) -> int:
        return len(self.groups)

    def record_ids(self) -> set[RecordId]:
        return set(self._group_of)

    def group_of(self, rid: RecordId) -> str:
        try:
            return self._group_of[rid]
        except KeyError:
            raise KeyError(f"unknown record id {rid!r}") from None

    def is_true_match(self, pair: Pair) -> bool:
        a, b = pair
        return self.group_of(a) == self.group_of(b)

    def true_pairs(self) -> set[Pair]:
        """All unordered within-group pairs (the complete graph of each group)."""
        pairs: set[Pair] = set()
        for group in self.groups:
            pairs.update(combinations(sorted(group.member_ids), 2))
        return pairs

    def n_true_pairs(self) -> int:
        return sum(len(g.member_ids) * (len(g.member_ids) - 1) // 2 for g in self.groups)


def validate_issuers(
    companies: Iterable[CompanyRecord], securities: Iterable[SecurityRecord]
) -> None:
    """Check that every security's issuer exists and lives in the same source."""
    by_id = {c.id: c for c in companies}
    for sec in securities:
        issuer = by_id.get(sec.issuer_id)
        if issuer is None:
            raise ReferentialIntegrityError(
                f"security {sec.id!r} references unknown issuer {sec.issuer_id!r}"
            )
        if issuer.source != sec.source:
            raise ReferentialIntegrityError(
                f"security {sec.id!r} (source {sec.source}) has issuer "
                f"{sec.issuer_id!r} from source {issuer.source}"
            )
