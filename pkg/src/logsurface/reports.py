"""Report documents emitted by the command line."""

from __future__ import annotations

from .bounds import run_pipeline
from .documents import (
    SCHEMA_VERSION,
    CaseDocument,
    certificate_to_json,
    morphism_to_json,
    pair_to_json,
    singularity_to_json,
    trace_to_json,
)
from .errors import DomainError
from .programs import count_negative_discrepancy, run_mmp, terminalize
from .singularity import classify

TRACKED_CAVEAT = "nef and big are relative to the tracked curve configuration"


def _head(command: str, doc: CaseDocument) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "case": doc.name}


def classify_report(doc: CaseDocument) -> dict:
    out = _head("classify", doc)
    out["singularity"] = singularity_to_json(classify(doc.pair))
    return out


def terminalize_report(doc: CaseDocument, order: str = "lex") -> dict:
    pair, morphism = terminalize(doc.pair, order)
    out = _head("terminalize", doc)
    out.update(
        {
            "input": pair_to_json(doc.pair),
            "output": pair_to_json(pair),
            "morphism": morphism_to_json(morphism),
            "singularity": singularity_to_json(classify(pair)),
        }
    )
    return out


def mmp_report(doc: CaseDocument, assume_big: bool = False) -> dict:
    if doc.bigness is None and not assume_big:
        raise DomainError("case has no bigness certificate; pass --assume-big to run anyway")
    trace = run_mmp(doc.pair, doc.bigness, assume_big=assume_big and doc.bigness is None)
    out = _head("mmp", doc)
    out.update(
        {
            "input": pair_to_json(doc.pair),
            "trace": trace_to_json(trace),
            "negative_discrepancy_count": count_negative_discrepancy(trace),
            "caveats": [TRACKED_CAVEAT] + ([] if doc.bigness else ["bigness assumed by the caller"]),
        }
    )
    return out


def pipeline_report(doc: CaseDocument):
    """Return ``(report, certificate)`` for one case."""
    if doc.inputs is None:
        raise DomainError("case document has no inputs section; the pipeline needs delta, epsilon and A")
    cert = run_pipeline(doc.pair, doc.inputs, doc.bigness, doc.coefficient_set)
    mmp = cert.stage("mmp")
    out = _head("pipeline", doc)
    out.update(
        {
            "singularity": singularity_to_json(classify(doc.pair)),
            "terminal_singularity": singularity_to_json(classify(cert.stage("terminalize").output)),
            "mmp": {
                "contracted": [s["curve"] for s in mmp.constants["steps"]],
                "negative_discrepancy_count": cert.stage("negative-discrepancy").constants["count"],
                "final_components": mmp.output.boundary.nt(),
            },
            "m0": cert.m0,
            "certificate": certificate_to_json(cert),
        }
    )
    return out, cert
