from __future__ import annotations

import json
from fractions import Fraction

import pytest

from logsurface.bounds import run_pipeline
from logsurface.documents import (
    CaseDocument,
    certificate_from_json,
    certificate_to_json,
    dumps,
    emit_case,
    model_from_json,
    parse_case,
    parse_certificate,
    write_atomic,
)
from logsurface.errors import ParseError, VersionError

MINIMAL = {
    "schema_version": "1",
    "name": "two",
    "model": {"divisors": ["A", "B"], "intersection": [["1", "1"], ["1", "1"]], "canonical": ["-3", "-3"]},
    "boundary": {"A": "2/3"},
}


def test_parse_minimal_document():
    doc = parse_case(json.dumps(MINIMAL))
    assert doc.pair.model.divisors == ("A", "B")
    assert doc.pair.coeff("A") == Fraction(2, 3)
    assert doc.inputs is None and doc.bigness is None


def test_integers_are_accepted_for_rationals():
    data = json.loads(json.dumps(MINIMAL))
    data["model"]["intersection"] = [[1, 1], [1, 1]]
    assert parse_case(json.dumps(data)).pair.model.pair("A", "B") == 1


def test_asymmetric_matrix_reports_path():
    data = json.loads(json.dumps(MINIMAL))
    data["model"]["intersection"] = [["1", "0"], ["1", "1"]]
    with pytest.raises(ParseError) as info:
        parse_case(json.dumps(data))
    assert info.value.path == "$.model.intersection[1][0]"


def test_float_literal_is_rejected_with_path():
    text = json.dumps(MINIMAL).replace('"2/3"', "0.66")
    with pytest.raises(ParseError) as info:
        parse_case(text)
    assert info.value.path == "$.boundary.A"


def test_decimal_string_is_rejected():
    data = json.loads(json.dumps(MINIMAL))
    data["boundary"] = {"A": "0.5"}
    with pytest.raises(ParseError) as info:
        parse_case(json.dumps(data))
    assert info.value.path == "$.boundary.A"


def test_version_checks():
    data = dict(MINIMAL, schema_version="2")
    with pytest.raises(VersionError):
        parse_case(json.dumps(data))
    data = {k: v for k, v in MINIMAL.items() if k != "schema_version"}
    with pytest.raises(ParseError):
        parse_case(json.dumps(data))


def test_malformed_json_reports_line():
    with pytest.raises(ParseError) as info:
        parse_case('{\n  "schema_version": "1",\n  oops\n}')
    assert info.value.line == 3


def test_missing_field_path():
    with pytest.raises(ParseError) as info:
        model_from_json({"divisors": ["A"], "canonical": ["-3"]}, "$.model")
    assert info.value.path == "$.model.intersection"


def test_boundary_outside_unit_interval():
    data = dict(MINIMAL, boundary={"A": "3/2"})
    with pytest.raises(ParseError) as info:
        parse_case(json.dumps(data))
    assert info.value.path == "$.boundary"


def test_case_round_trip(worked_doc):
    text = emit_case(worked_doc)
    again = parse_case(text)
    assert again == worked_doc
    assert emit_case(again) == text


def test_certificate_round_trip(worked_doc):
    cert = run_pipeline(worked_doc.pair, worked_doc.inputs, worked_doc.bigness, worked_doc.coefficient_set)
    blob = certificate_to_json(cert)
    assert certificate_from_json(json.loads(dumps(blob))) == cert
    assert parse_certificate(dumps({"schema_version": "1", "certificate": blob})) == cert
    with pytest.raises(ParseError):
        parse_certificate(dumps({"schema_version": "1"}))


def test_dumps_is_canonical():
    assert dumps({"b": 1, "a": [1, 2]}) == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'


def test_write_atomic(tmp_path):
    target = tmp_path / "sub" / "out.json"
    write_atomic(target, "x\n")
    assert target.read_text() == "x\n"
    assert [p.name for p in target.parent.iterdir()] == ["out.json"]


def test_case_document_defaults(worked_pair):
    doc = CaseDocument("x", worked_pair)
    assert parse_case(emit_case(doc)) == doc
