from __future__ import annotations

from dataclasses import replace
from fractions import Fraction

import pytest

from logsurface.bounds import (
    STAGES,
    BoundInputs,
    birationality_threshold,
    run_pipeline,
    semigroup_decompose,
    semigroup_member,
    semigroup_table,
    verify_certificate,
)
from logsurface.errors import DomainError, ResourceError, StageError
from logsurface.numeric import CoefficientSet, QDivisor
from logsurface.programs import BignessCertificate
from logsurface.surface import model_from_rows, pair_from

WORKED_CERT = BignessCertificate(QDivisor({"K": 1, "D1": "1/3", "D2": "1/3"}))
WORKED_INPUTS = BoundInputs(Fraction(1, 2), Fraction(1, 3), 3)


@pytest.mark.parametrize(
    "N, m, expected",
    [(2, 5, [2]), (3, 10, [3]), (2, 4, None), (1, 2, [1]), (2, 7, [3]), (3, 11, [1, 2])],
)
def test_semigroup_examples(N, m, expected):
    got = semigroup_decompose(N, m)
    if expected is None:
        assert got is None
        assert not semigroup_member(N, m)
    else:
        assert sum(q * N + 1 for q in got) == m
        assert sorted(got) == sorted(expected)


def test_semigroup_covers_everything_past_the_bound():
    for N in range(1, 8):
        table = semigroup_table(N, N * N + 200)
        for m in range(N * N + 1, N * N + 201):
            qs = semigroup_decompose(N, m)
            assert qs is not None and sum(q * N + 1 for q in qs) == m
            assert table[m] != 0


def test_semigroup_gaps_below_the_bound():
    # N^2 is never representable: every generator exceeds N, and N^2 = r + qN with r = number of terms
    for N in range(2, 10):
        assert semigroup_decompose(N, N * N) is None


def test_semigroup_rejects_bad_input():
    with pytest.raises(DomainError):
        semigroup_decompose(0, 5)
    with pytest.raises(DomainError):
        semigroup_decompose(2, 0)
    with pytest.raises(ResourceError):
        semigroup_table(2, 10**7)


def test_birationality_threshold():
    assert birationality_threshold(1) == 325
    assert birationality_threshold(2) == 1297
    with pytest.raises(DomainError):
        birationality_threshold(0)


def test_threshold_range_decomposes_for_small_n():
    for N in range(1, 6):
        start = N * N + 1
        for m in range(start, start + 501):
            qs = semigroup_decompose(N, m)
            assert sum(q * N + 1 for q in qs) == m


def test_bound_inputs_validation():
    with pytest.raises(DomainError):
        BoundInputs(Fraction(0), Fraction(1, 2), 1)
    with pytest.raises(DomainError):
        BoundInputs(Fraction(1, 2), Fraction(1), 1)
    with pytest.raises(DomainError):
        BoundInputs(Fraction(1, 2), Fraction(1, 2), 0)
    with pytest.raises(DomainError):
        BoundInputs(Fraction(1, 2), Fraction(1, 2), 1, N_cartier=0)


def test_pipeline_minimal():
    M = model_from_rows(["C"], [[2]], [2], canonical_square=1)
    cert = run_pipeline(pair_from(M), BoundInputs(Fraction(1, 2), Fraction(1, 2), 1), BignessCertificate(QDivisor({"K": 1})))
    assert (cert.N, cert.N_final, cert.m0) == (1, 18, 325)
    assert cert.stage("mmp").constants["steps"] == []
    assert verify_certificate(cert) == []


def test_pipeline_worked_pair(worked_pair):
    cert = run_pipeline(worked_pair, WORKED_INPUTS, WORKED_CERT)
    assert tuple(s.name for s in cert.stages) == STAGES
    assert cert.stage("round").constants["k"] == 3
    assert cert.stage("terminalize").constants["exceptional_coefficients"] == {"E1": "1/3", "E2": "0", "E3": "0"}
    assert [s["curve"] for s in cert.stage("mmp").constants["steps"]] == ["D1", "E2", "E1", "E3"]
    assert cert.stage("negative-discrepancy").constants["count"] == 2
    assert cert.N == 9 and cert.m0 == 26245
    assert cert.stage("threshold").constants["volume"] == "76/27"
    assert verify_certificate(cert) == []


def test_pipeline_deterministic(worked_pair):
    a = run_pipeline(worked_pair, WORKED_INPUTS, WORKED_CERT)
    b = run_pipeline(worked_pair, WORKED_INPUTS, WORKED_CERT)
    assert a == b


def test_pipeline_component_bound(worked_pair):
    with pytest.raises(StageError) as info:
        run_pipeline(worked_pair, BoundInputs(Fraction(1, 2), Fraction(1, 3), 1), WORKED_CERT)
    assert info.value.stage == "redundant"


def test_pipeline_epsilon_stage(worked_pair):
    with pytest.raises(StageError) as info:
        run_pipeline(worked_pair, BoundInputs(Fraction(1, 2), Fraction(1, 2), 3), WORKED_CERT)
    assert info.value.stage == "epsilon-klt"


def test_pipeline_supplied_cartier_index(worked_pair):
    cert = run_pipeline(worked_pair, BoundInputs(Fraction(1, 2), Fraction(1, 3), 3, N_cartier=18), WORKED_CERT)
    assert cert.N == 18
    with pytest.raises(StageError) as info:
        run_pipeline(worked_pair, BoundInputs(Fraction(1, 2), Fraction(1, 3), 3, N_cartier=6), WORKED_CERT)
    assert info.value.stage == "cartier"


def test_pipeline_coefficient_set(worked_pair):
    I = CoefficientSet.of(["2/3"], dcc_floor="1/2")
    cert = run_pipeline(worked_pair, WORKED_INPUTS, WORKED_CERT, I)
    assert cert.stage("round").constants["k"] == 4
    with pytest.raises(StageError):
        run_pipeline(worked_pair, WORKED_INPUTS, WORKED_CERT, CoefficientSet.of(["1/2"]))


def test_pipeline_rejects_non_klt(worked_pair):
    with pytest.raises(StageError) as info:
        run_pipeline(pair_from(worked_pair.model, {"D1": 1}), WORKED_INPUTS, WORKED_CERT)
    assert info.value.stage == "input"


def test_verify_detects_tampering(worked_pair):
    cert = run_pipeline(worked_pair, WORKED_INPUTS, WORKED_CERT)
    assert verify_certificate(replace(cert, m0=cert.m0 + 1))
    assert verify_certificate(replace(cert, N=cert.N * 2))
    stages = list(cert.stages)
    stages[5] = replace(stages[5], constants={**stages[5].constants, "nef_on_tracked": False})
    assert verify_certificate(replace(cert, stages=tuple(stages)))
