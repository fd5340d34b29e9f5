from __future__ import annotations

import pytest

from matstage.errors import ValidationError
from matstage.model import (
    Agent,
    CurationState,
    EntityLabel,
    ErrorType,
    MaterialRecord,
    Passage,
    Span,
    Status,
    is_visible,
    make_record,
    with_fields,
)


def test_make_record_starts_automatic_new():
    record = make_record("0aa1b3161f", "MgB2", "MgB2", "39 K", None, "p1")
    assert record.state == CurationState(Agent.AUTOMATIC, Status.NEW)
    assert record.error_type is None
    assert record.previous_version is None
    assert record.tc_kelvin is None
    assert record.pressure_gpa is None


def test_make_record_rejects_empty_material():
    with pytest.raises(ValidationError):
        make_record("0aa1b3161f", "", "MgB2", "39 K", None, "p1")


@pytest.mark.parametrize("document_id", ["xyz", "0AA1B3161F", "0aa1b3161", "0aa1b3161f0"])
def test_make_record_rejects_malformed_document_id(document_id):
    with pytest.raises(ValidationError):
        make_record(document_id, "MgB2", "MgB2", "39 K", None, "p1")


@pytest.mark.parametrize(
    "status,visible",
    [
        (Status.NEW, True),
        (Status.CURATED, True),
        (Status.VALIDATED, True),
        (Status.INVALID, True),
        (Status.OBSOLETE, False),
        (Status.REMOVED, False),
    ],
)
def test_visibility(status, visible):
    record = make_record("0aa1b3161f", "MgB2", "MgB2", "39 K", None, "p1")
    agent = Agent.AUTOMATIC if status in (Status.NEW, Status.INVALID) else Agent.MANUAL
    record = with_fields(record, state=CurationState(agent, status))
    assert is_visible(record) is visible


def test_state_invariants():
    with pytest.raises(ValidationError):
        CurationState(Agent.MANUAL, Status.NEW)
    for status in (Status.CURATED, Status.VALIDATED, Status.REMOVED):
        with pytest.raises(ValidationError):
            CurationState(Agent.AUTOMATIC, status)
    # invalid admits either agent
    CurationState(Agent.AUTOMATIC, Status.INVALID)
    CurationState(Agent.MANUAL, Status.INVALID)


def test_error_type_members():
    assert {e.value for e in ErrorType} == {
        "from_table",
        "extraction",
        "linking",
        "tc_classification",
        "composition_resolution",
        "value_resolution",
        "anomaly_detection",
        "curation_amends",
    }


def test_entity_label_members():
    assert {e.value for e in EntityLabel} == {
        "class",
        "material",
        "me_method",
        "pressure",
        "tc",
        "tcValue",
    }


@pytest.mark.parametrize("enum_cls", [ErrorType, EntityLabel, Agent, Status])
def test_enum_round_trip(enum_cls):
    for member in enum_cls:
        assert enum_cls(member.value) is member


def test_curation_state_json_round_trip():
    for agent in Agent:
        for status in Status:
            try:
                state = CurationState(agent, status)
            except ValidationError:
                continue
            assert CurationState.from_json(state.to_json()) == state


def test_record_json_round_trip():
    record = make_record("0aa1b3161f", "MgB2", "MgB2", "39 K", "1 GPa", "p1")
    record = with_fields(record, tc_kelvin=39.0, pressure_gpa=1.0,
                         error_type=ErrorType.LINKING, extensions={"note": "x"})
    data = record.to_json()
    assert data["state"] == {"agent": "automatic", "status": "new"}
    assert data["error_type"] == "linking"
    assert MaterialRecord.from_json(data) == record


def test_span_validation():
    Span(0, 4, EntityLabel.MATERIAL, "MgB2").validate_against("MgB2 rocks")
    with pytest.raises(ValidationError):
        Span(0, 4, EntityLabel.MATERIAL, "XXXX").validate_against("MgB2 rocks")
    with pytest.raises(ValidationError):
        Span(3, 3, EntityLabel.MATERIAL, "").validate_against("MgB2 rocks")
    with pytest.raises(ValidationError):
        Span(6, 99, EntityLabel.MATERIAL, "rocks").validate_against("MgB2 rocks")


def test_passage_rejects_overlapping_spans():
    with pytest.raises(ValidationError):
        Passage(
            "p1",
            "0aa1b3161f",
            "MgB2 rocks",
            spans=(
                Span(0, 4, EntityLabel.MATERIAL, "MgB2"),
                Span(2, 6, EntityLabel.TC, "B2 r"),
            ),
        )
