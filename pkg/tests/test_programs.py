from __future__ import annotations

import random
from fractions import Fraction

import pytest

from logsurface.errors import DomainError
from logsurface.generators import random_blowup_chain, random_divisor, random_klt_pair, random_terminal_pair
from logsurface.numeric import QDivisor
from logsurface.programs import (
    BignessCertificate,
    check_projection_formula,
    count_negative_discrepancy,
    redundant_part,
    run_mmp,
    terminalize,
)
from logsurface.singularity import classify
from logsurface.surface import BlowUpSpec, LogPair, blow_up, blow_up_model, is_nef_on_tracked, pair_from, pullback


def test_terminalize_worked_pair(worked_pair):
    out, f = terminalize(worked_pair)
    assert len(f.steps) == 3
    assert [out.coeff(e) for e in f.exceptional()] == [Fraction(1, 3), 0, 0]
    assert classify(out).terminal
    assert pullback(f, worked_pair.log_canonical()) == out.log_canonical()
    assert all((3 * v).denominator == 1 for v in out.boundary.values())


def test_terminalize_orders_agree_on_result_class(worked_pair):
    out, _ = terminalize(worked_pair, "reverse")
    assert classify(out).terminal
    with pytest.raises(DomainError):
        terminalize(worked_pair, "random")


def test_terminalize_terminal_pair_is_identity():
    pair = random_terminal_pair(random.Random(1))
    out, f = terminalize(pair)
    assert f.steps == () and out.model == pair.model


def test_terminalize_refuses_non_klt(worked_pair):
    with pytest.raises(DomainError):
        terminalize(pair_from(worked_pair.model, {"D1": 1}))


def test_mmp_on_worked_pair(worked_pair):
    cert = BignessCertificate(QDivisor({"K": 1, "D1": "1/3", "D2": "1/3"}))
    trace = run_mmp(worked_pair, cert)
    assert trace.contracted() == ("D1",)
    assert trace.final_discrepancies == {"D1": Fraction(-5, 9)}
    assert is_nef_on_tracked(trace.final.model, trace.final.log_canonical())
    assert count_negative_discrepancy(trace) == 1


def test_mmp_undoes_a_fresh_blow_up():
    pair = random_terminal_pair(random.Random(4), extra_blowups=0)
    up = LogPair(blow_up_model(pair.model, BlowUpSpec.general()), pair.boundary)
    trace = run_mmp(up, assume_big=True)
    assert "E1" in trace.contracted()
    assert trace.final_discrepancies["E1"] == 1


def test_mmp_nef_input_gives_empty_trace(worked_pair):
    model = worked_pair.model
    pair = pair_from(model, {"D2": "1/2"})
    # K + D2/2 is negative on D1? (K + D2/2).D1 = 1 + 1/2 > 0, and on D2: 0 + 1 > 0
    trace = run_mmp(pair, assume_big=True)
    assert trace.steps == ()
    assert count_negative_discrepancy(trace) == 0


def test_mmp_requires_bigness(worked_pair):
    with pytest.raises(DomainError):
        run_mmp(worked_pair)
    with pytest.raises(DomainError):
        run_mmp(worked_pair, BignessCertificate(QDivisor({"K": -1})))


def test_mmp_discrepancy_matches_contraction_record():
    rng = random.Random(12)
    for _ in range(40):
        pair = random_terminal_pair(rng)
        trace = run_mmp(pair, assume_big=True)
        for step in trace.steps:
            assert step.degree < 0 and step.self_intersection < 0
        if len(trace.steps) == 1:
            s = trace.steps[0]
            assert trace.final_discrepancies[s.curve] == s.discrepancy


def test_count_bounded_by_components():
    rng = random.Random(21)
    for _ in range(60):
        pair = random_terminal_pair(rng)
        trace = run_mmp(pair, assume_big=True)
        assert count_negative_discrepancy(trace) <= pair.boundary.nt()


def test_bigness_certificate_problems(worked_pair):
    model = worked_pair.model
    good = BignessCertificate(QDivisor({"K": 1, "D1": "1/3", "D2": "1/3"}))
    assert good.certifies(model, worked_pair.log_canonical())
    assert not good.certifies(model, QDivisor({"K": 1}))
    bad = BignessCertificate(QDivisor({"D1": 1}))
    assert any("negative" in p for p in bad.problems(model, worked_pair.log_canonical()))


def test_certificate_pulls_back(worked_pair):
    cert = BignessCertificate(QDivisor({"K": 1, "D1": "1/3", "D2": "1/3"}))
    up, f = blow_up(worked_pair, BlowUpSpec.intersection("D1", "D2"))
    assert cert.pullback(f).certifies(up.model, up.log_canonical())


def test_redundant_part(worked_pair):
    cert = BignessCertificate(QDivisor({"K": 1, "D1": "1/3", "D2": "1/3"}))
    assert redundant_part(worked_pair, cert) == QDivisor()
    # an oracle that only needs D2: D1 is dropped, D2 kept
    removed = redundant_part(worked_pair, lambda p: p.coeff("D2") > 0)
    assert removed == {"D1": Fraction(2, 3)}
    with pytest.raises(DomainError):
        redundant_part(worked_pair, lambda p: False)


def test_redundant_part_empty_boundary():
    model = random_terminal_pair(random.Random(0)).model
    assert redundant_part(pair_from(model), lambda p: True) == QDivisor()


def test_projection_formula_examples(worked_pair):
    model = worked_pair.model
    up, f = blow_up(pair_from(model, {"D1": "1/2"}), BlowUpSpec.free("D1"))
    assert check_projection_formula(f, QDivisor({"D1": "1/2"}), 1, QDivisor({"E1": 1}))
    assert check_projection_formula(f, QDivisor({"D1": 2}), 5, QDivisor())
    with pytest.raises(DomainError):
        check_projection_formula(f, QDivisor({"D1": 1}), 0, QDivisor())
    with pytest.raises(DomainError):
        check_projection_formula(f, QDivisor({"D1": 1}), 1, QDivisor({"D1": 1}))


def test_projection_formula_random():
    rng = random.Random(9)
    for _ in range(100):
        pair = random_klt_pair(rng, 4)
        top, f = random_blowup_chain(rng, pair, rng.randint(1, 3))
        D = random_divisor(rng, pair.model, with_canonical=False)
        E = QDivisor({e: rng.randint(0, 3) for e in f.exceptional()})
        assert check_projection_formula(f, D, rng.randint(1, 7), E)
