import pytest

from groupmatch.core import (
    CompanyRecord,
    EntityGroup,
    GroundTruth,
    IdScheme,
    RecordKind,
    SecurityRecord,
)


def company(rid, source, name, **kwargs):
    return CompanyRecord(id=rid, source=source, name=name, **kwargs)


def security(rid, source, issuer, name="Test Equity", **identifiers):
    ids = {IdScheme(k): v for k, v in identifiers.items()}
    return SecurityRecord(id=rid, source=source, issuer_id=issuer, name=name, identifiers=ids)


def truth_of(*groups, kind=RecordKind.COMPANY):
    """Ground truth from bare member-id collections; group ids are g0, g1, ..."""
    return GroundTruth(
        EntityGroup(f"g{i}", frozenset(members), kind) for i, members in enumerate(groups)
    )


@pytest.fixture
def two_truth_groups():
    return truth_of({"a1", "a2", "a3", "a4"}, {"b1", "b2", "b3", "b4"})
