"""JSON documents: case inputs, reports and bound certificates (schema version "1").

Rationals are always written as ``"p/q"`` (or integer) strings.  Output is
``json.dumps(..., sort_keys=True, indent=2)`` plus a trailing newline, so
identical inputs give identical bytes.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from .bounds import BoundCertificate, BoundInputs, Stage
from .errors import DomainError, ParseError, VersionError
from .numeric import CoefficientSet, QDivisor, as_fraction, format_fraction
from .programs import BignessCertificate, MMPTrace
from .singularity import SingularityReport, Witness
from .surface import LogPair, ModelMorphism, Step, SurfaceModel

SCHEMA_VERSION = "1"
COMPUTE_CONCRETE = "compute-concrete"


@dataclass(frozen=True)
class CaseDocument:
    name: str
    pair: LogPair
    inputs: BoundInputs | None = None
    coefficient_set: CoefficientSet | None = None
    bigness: BignessCertificate | None = None


# ---------------------------------------------------------------------------
# low-level readers


def _fail(path: str, message: str) -> ParseError:
    return ParseError(message, path)


def _obj(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise _fail(path, "expected an object")
    return value


def _list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise _fail(path, "expected an array")
    return value


def _str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise _fail(path, "expected a string")
    return value


def _int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail(path, "expected an integer")
    return value


def _bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise _fail(path, "expected true or false")
    return value


def _rat(value: Any, path: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise _fail(path, 'expected an exact rational ("p/q" string or integer)')
    try:
        return as_fraction(value)
    except (ValueError, ZeroDivisionError):
        raise _fail(path, f"not an exact rational: {value!r}") from None


def _req(obj: dict, key: str, path: str) -> Any:
    if key not in obj:
        raise _fail(f"{path}.{key}", "missing field")
    return obj[key]


def _divisor(value: Any, path: str) -> QDivisor:
    obj = _obj(value, path)
    return QDivisor({_str(k, path): _rat(v, f"{path}.{k}") for k, v in obj.items()})


def _rat_str(x: Fraction) -> str:
    return format_fraction(x)


# ---------------------------------------------------------------------------
# models and pairs


def model_to_json(model: SurfaceModel) -> dict:
    return {
        "divisors": [{"id": d, "label": l} for d, l in zip(model.divisors, model.labels)],
        "intersection": [[_rat_str(v) for v in row] for row in model.form],
        "canonical": [_rat_str(v) for v in model.canonical],
        "canonical_square": None if model.canonical_square is None else _rat_str(model.canonical_square),
        "smooth": model.smooth,
    }


def model_from_json(value: Any, path: str = "model") -> SurfaceModel:
    obj = _obj(value, path)
    divs = _list(_req(obj, "divisors", path), f"{path}.divisors")
    ids, labels = [], []
    for n, entry in enumerate(divs):
        p = f"{path}.divisors[{n}]"
        if isinstance(entry, str):
            ids.append(entry)
            labels.append(entry)
        else:
            e = _obj(entry, p)
            ids.append(_str(_req(e, "id", p), f"{p}.id"))
            labels.append(_str(e.get("label", ids[-1]), f"{p}.label"))
    rows = _list(_req(obj, "intersection", path), f"{path}.intersection")
    if len(rows) != len(ids):
        raise _fail(f"{path}.intersection", f"expected {len(ids)} rows, got {len(rows)}")
    form = []
    for i, row in enumerate(rows):
        p = f"{path}.intersection[{i}]"
        row = _list(row, p)
        if len(row) != len(ids):
            raise _fail(p, f"expected {len(ids)} entries, got {len(row)}")
        form.append(tuple(_rat(v, f"{p}[{j}]") for j, v in enumerate(row)))
    for i in range(len(ids)):
        for j in range(i):
            if form[i][j] != form[j][i]:
                raise _fail(f"{path}.intersection[{i}][{j}]", "intersection matrix is not symmetric")
    can = _list(_req(obj, "canonical", path), f"{path}.canonical")
    if len(can) != len(ids):
        raise _fail(f"{path}.canonical", f"expected {len(ids)} entries, got {len(can)}")
    canonical = tuple(_rat(v, f"{path}.canonical[{i}]") for i, v in enumerate(can))
    k2 = obj.get("canonical_square")
    k2 = None if k2 is None else _rat(k2, f"{path}.canonical_square")
    smooth = _bool(obj.get("smooth", True), f"{path}.smooth")
    try:
        return SurfaceModel(tuple(ids), tuple(form), canonical, tuple(labels), k2, smooth)
    except DomainError as err:
        raise _fail(path, str(err)) from None


def pair_to_json(pair: LogPair) -> dict:
    return {"model": model_to_json(pair.model), "boundary": pair.boundary.to_strings(), "snc": pair.snc}


def pair_from_json(value: Any, path: str = "pair") -> LogPair:
    obj = _obj(value, path)
    model = model_from_json(_req(obj, "model", path), f"{path}.model")
    boundary = _divisor(obj.get("boundary", {}), f"{path}.boundary")
    snc = _bool(obj.get("snc", True), f"{path}.snc")
    try:
        return LogPair(model, boundary, False, snc)
    except DomainError as err:
        raise _fail(f"{path}.boundary", str(err)) from None


# ---------------------------------------------------------------------------
# case documents


def inputs_to_json(inputs: BoundInputs) -> dict:
    return {
        "delta": _rat_str(inputs.delta),
        "epsilon": _rat_str(inputs.epsilon),
        "A": inputs.A,
        "N_cartier": COMPUTE_CONCRETE if inputs.N_cartier is None else inputs.N_cartier,
        "drop_redundant": inputs.drop_redundant,
    }


def inputs_from_json(value: Any, path: str = "inputs") -> BoundInputs:
    obj = _obj(value, path)
    n = obj.get("N_cartier", COMPUTE_CONCRETE)
    n = None if n == COMPUTE_CONCRETE else _int(n, f"{path}.N_cartier")
    try:
        return BoundInputs(
            _rat(_req(obj, "delta", path), f"{path}.delta"),
            _rat(_req(obj, "epsilon", path), f"{path}.epsilon"),
            _int(_req(obj, "A", path), f"{path}.A"),
            n,
            _bool(obj.get("drop_redundant", True), f"{path}.drop_redundant"),
        )
    except DomainError as err:
        raise _fail(path, str(err)) from None


def coefficient_set_to_json(I: CoefficientSet | None) -> dict | None:
    if I is None:
        return None
    return {
        "elements": [_rat_str(e) for e in I.elements],
        "dcc_floor": None if I.dcc_floor is None else _rat_str(I.dcc_floor),
    }


def coefficient_set_from_json(value: Any, path: str = "coefficient_set") -> CoefficientSet | None:
    if value is None:
        return None
    obj = _obj(value, path)
    elems = _list(_req(obj, "elements", path), f"{path}.elements")
    floor = obj.get("dcc_floor")
    try:
        return CoefficientSet(
            tuple(_rat(e, f"{path}.elements[{i}]") for i, e in enumerate(elems)),
            None if floor is None else _rat(floor, f"{path}.dcc_floor"),
        )
    except DomainError as err:
        raise _fail(path, str(err)) from None


def bigness_to_json(cert: BignessCertificate | None) -> dict | None:
    if cert is None:
        return None
    return {"nef": cert.nef.to_strings(), "effective": cert.effective.to_strings()}


def bigness_from_json(value: Any, path: str = "bigness_certificate") -> BignessCertificate | None:
    if value is None:
        return None
    obj = _obj(value, path)
    return BignessCertificate(
        _divisor(_req(obj, "nef", path), f"{path}.nef"),
        _divisor(obj.get("effective", {}), f"{path}.effective"),
    )


def _check_version(obj: dict) -> None:
    version = obj.get("schema_version")
    if version is None:
        raise ParseError("missing field", "$.schema_version")
    if version != SCHEMA_VERSION:
        raise VersionError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION!r})", "$.schema_version")


def _load(data: bytes | str) -> Any:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as err:
            raise ParseError(f"input is not UTF-8: {err}") from None
    try:
        return json.loads(data, parse_float=_reject_float)
    except json.JSONDecodeError as err:
        raise ParseError(err.msg, "$", err.lineno) from None


class _FloatLiteral(str):
    pass


def _reject_float(text: str) -> _FloatLiteral:
    # kept as a marker type so field readers report the exact path
    return _FloatLiteral(text)


def parse_case(data: bytes | str) -> CaseDocument:
    obj = _obj(_load(data), "$")
    _check_version(obj)
    _no_floats(obj, "$")
    name = _str(obj.get("name", "case"), "$.name")
    model = model_from_json(_req(obj, "model", "$"), "$.model")
    boundary = _divisor(obj.get("boundary", {}), "$.boundary")
    snc = _bool(obj.get("snc", True), "$.snc")
    try:
        pair = LogPair(model, boundary, False, snc)
    except DomainError as err:
        raise ParseError(str(err), "$.boundary") from None
    inputs = obj.get("inputs")
    return CaseDocument(
        name,
        pair,
        None if inputs is None else inputs_from_json(inputs, "$.inputs"),
        coefficient_set_from_json(obj.get("coefficient_set"), "$.coefficient_set"),
        bigness_from_json(obj.get("bigness_certificate"), "$.bigness_certificate"),
    )


def _no_floats(value: Any, path: str) -> None:
    if isinstance(value, _FloatLiteral):
        raise ParseError(f"floating-point literal {value} is not allowed; write rationals as strings", path)
    if isinstance(value, dict):
        for k, v in value.items():
            _no_floats(v, f"{path}.{k}")
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _no_floats(v, f"{path}[{i}]")


def case_to_json(doc: CaseDocument) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": doc.name,
        "model": model_to_json(doc.pair.model),
        "boundary": doc.pair.boundary.to_strings(),
        "snc": doc.pair.snc,
        "inputs": None if doc.inputs is None else inputs_to_json(doc.inputs),
        "coefficient_set": coefficient_set_to_json(doc.coefficient_set),
        "bigness_certificate": bigness_to_json(doc.bigness),
    }


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def emit_case(doc: CaseDocument) -> str:
    return dumps(case_to_json(doc))


# ---------------------------------------------------------------------------
# report pieces


def witness_to_json(w: Witness) -> dict:
    return {
        "kind": w.kind,
        "divisors": list(w.divisors),
        "discrepancy": "-inf" if w.discrepancy is None else _rat_str(w.discrepancy),
    }


def singularity_to_json(report: SingularityReport) -> dict:
    return {
        "classification": report.classification,
        "min_discrepancy": "-inf" if report.min_discrepancy is None else _rat_str(report.min_discrepancy),
        "epsilon_klt_threshold": "not-klt"
        if report.epsilon_klt_threshold is None
        else _rat_str(report.epsilon_klt_threshold),
        "witnesses": [witness_to_json(w) for w in report.witnesses],
        "convention": report.convention,
    }


def step_to_json(step: Step) -> dict:
    out: dict[str, Any] = {"kind": step.kind, "divisor": step.divisor, "coefficient": _rat_str(step.coefficient)}
    if step.spec is not None:
        out["centre"] = {"kind": step.spec.kind, "divisors": [d for d in (step.spec.i, step.spec.j) if d]}
    if step.kind == "contract":
        out["self_intersection"] = _rat_str(step.self_intersection)
        out["canonical_degree"] = _rat_str(step.canonical_degree)
    return out


def morphism_to_json(morphism: ModelMorphism) -> dict:
    return {
        "steps": [step_to_json(s) for s in morphism.steps],
        "exceptional": list(morphism.exceptional()),
    }


def trace_to_json(trace: MMPTrace) -> dict:
    return {
        "steps": [
            {
                "curve": s.curve,
                "degree": _rat_str(s.degree),
                "self_intersection": _rat_str(s.self_intersection),
                "discrepancy": _rat_str(s.discrepancy),
            }
            for s in trace.steps
        ],
        "final": pair_to_json(trace.final),
        "final_discrepancies": {c: _rat_str(v) for c, v in sorted(trace.final_discrepancies.items())},
    }


# ---------------------------------------------------------------------------
# certificates


def certificate_to_json(cert: BoundCertificate) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "bound-certificate",
        "inputs": inputs_to_json(cert.inputs),
        "bigness_certificate": bigness_to_json(cert.bigness),
        "coefficient_set": coefficient_set_to_json(cert.coefficient_set),
        "stages": [
            {"name": s.name, "input": pair_to_json(s.input), "output": pair_to_json(s.output), "constants": s.constants}
            for s in cert.stages
        ],
        "N": cert.N,
        "N_final": cert.N_final,
        "m0": cert.m0,
        "caveats": list(cert.caveats),
    }


def certificate_from_json(value: Any, path: str = "$") -> BoundCertificate:
    obj = _obj(value, path)
    _check_version(obj)
    if obj.get("kind") != "bound-certificate":
        raise ParseError("not a bound certificate", f"{path}.kind")
    stages = []
    for n, raw in enumerate(_list(_req(obj, "stages", path), f"{path}.stages")):
        p = f"{path}.stages[{n}]"
        s = _obj(raw, p)
        stages.append(
            Stage(
                _str(_req(s, "name", p), f"{p}.name"),
                pair_from_json(_req(s, "input", p), f"{p}.input"),
                pair_from_json(_req(s, "output", p), f"{p}.output"),
                _obj(s.get("constants", {}), f"{p}.constants"),
            )
        )
    bigness = bigness_from_json(_req(obj, "bigness_certificate", path), f"{path}.bigness_certificate")
    if bigness is None:
        raise ParseError("missing bigness certificate", f"{path}.bigness_certificate")
    return BoundCertificate(
        inputs_from_json(_req(obj, "inputs", path), f"{path}.inputs"),
        bigness,
        coefficient_set_from_json(obj.get("coefficient_set"), f"{path}.coefficient_set"),
        tuple(stages),
        _int(_req(obj, "N", path), f"{path}.N"),
        _int(_req(obj, "N_final", path), f"{path}.N_final"),
        _int(_req(obj, "m0", path), f"{path}.m0"),
        tuple(_str(c, f"{path}.caveats[{i}]") for i, c in enumerate(_list(_req(obj, "caveats", path), f"{path}.caveats"))),
    )


def parse_certificate(data: bytes | str) -> BoundCertificate:
    """Read a bare certificate or a pipeline report that embeds one."""
    obj = _obj(_load(data), "$")
    _no_floats(obj, "$")
    _check_version(obj)
    if obj.get("kind") == "bound-certificate":
        return certificate_from_json(obj)
    if "certificate" in obj:
        return certificate_from_json(obj["certificate"], "$.certificate")
    raise ParseError("document holds no bound certificate", "$")


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to a temporary file next to ``path`` and rename it into place."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
