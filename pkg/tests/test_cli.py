from __future__ import annotations

import json
import shutil
import subprocess
import sys

import pytest

from logsurface.cli import main
from tampering import tampered_reports


def run(*args):
    return main(list(args))


def test_semigroup_command(capsys):
    assert run("semigroup", "--n", "2", "--m", "5") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["results"] == [{"decomposition": [2], "m": 5}]
    assert run("semigroup", "--n", "2", "--m", "4") == 0
    assert json.loads(capsys.readouterr().out)["results"][0]["decomposition"] == "not-representable"


def test_semigroup_sweep(capsys):
    assert run("semigroup", "--n", "3", "--sweep", "10..14") == 0
    rows = json.loads(capsys.readouterr().out)["results"]
    assert [r["m"] for r in rows] == [10, 11, 12, 13, 14]
    for r in rows:
        assert sum(q * 3 + 1 for q in r["decomposition"]) == r["m"]


def test_semigroup_needs_m(capsys):
    assert run("semigroup", "--n", "3") == 1
    assert "error" in capsys.readouterr().err


def test_classify_command(capsys, golden_dir):
    assert run("classify", "--input", str(golden_dir / "worked-pair.case.json")) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["singularity"]["classification"] == "klt-not-canonical"
    assert out["singularity"]["min_discrepancy"] == "-1/3"


def test_terminalize_command(capsys, golden_dir):
    assert run("terminalize", "--input", str(golden_dir / "worked-pair.case.json"), "--order", "reverse") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["singularity"]["classification"] == "terminal"
    assert len(out["morphism"]["steps"]) == 3


def test_mmp_command(capsys, golden_dir, tmp_path):
    assert run("mmp", "--input", str(golden_dir / "worked-pair.case.json")) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["negative_discrepancy_count"] == 1
    data = json.loads((golden_dir / "worked-pair.case.json").read_text())
    data["bigness_certificate"] = None
    case = tmp_path / "nocert.case.json"
    case.write_text(json.dumps(data))
    assert run("mmp", "--input", str(case)) == 1
    assert "--assume-big" in capsys.readouterr().err
    assert run("mmp", "--input", str(case), "--assume-big") == 0


def test_pipeline_matches_golden(tmp_path, golden_dir):
    for stem in ("minimal", "worked-pair"):
        target = tmp_path / f"{stem}.report.json"
        assert run("pipeline", "--input", str(golden_dir / f"{stem}.case.json"), "--output", str(target)) == 0
        assert target.read_bytes() == (golden_dir / f"{stem}.report.json").read_bytes()


def test_pipeline_timing_only_on_request(tmp_path, golden_dir):
    target = tmp_path / "r.json"
    assert run("pipeline", "--input", str(golden_dir / "minimal.case.json"), "--output", str(target), "--timing") == 0
    assert "timing" in json.loads(target.read_text())
    assert "timing" not in json.loads((golden_dir / "minimal.report.json").read_text())


def test_batch_mode_and_figures(tmp_path, golden_dir):
    cases = tmp_path / "cases"
    cases.mkdir()
    for p in golden_dir.glob("*.case.json"):
        shutil.copy(p, cases / p.name)
    (cases / "broken.case.json").write_text('{"schema_version": "1", "model": 3}')
    out, figs = tmp_path / "out", tmp_path / "figs"
    assert run("pipeline", "--input", str(cases), "--output", str(out), "--figures", str(figs)) == 3
    index = json.loads((out / "index.json").read_text())
    codes = {c["case_file"]: c["exit_code"] for c in index["cases"]}
    assert codes == {"broken.case.json": 3, "minimal.case.json": 0, "worked-pair.case.json": 0}
    assert (out / "worked-pair.report.json").read_bytes() == (golden_dir / "worked-pair.report.json").read_bytes()
    assert not (out / "broken.report.json").exists()
    assert sorted(p.name for p in figs.iterdir()) == ["minimal.dual_graphs.png", "worked-pair.dual_graphs.png"]


def test_verify_accepts_and_rejects(tmp_path, golden_dir, capsys):
    report = golden_dir / "worked-pair.report.json"
    assert run("verify", "--input", str(report)) == 0
    assert "m0 = 26245" in capsys.readouterr().out
    name, text = tampered_reports(report.read_text())[0]
    bad = tmp_path / "bad.json"
    bad.write_text(text)
    assert run("verify", "--input", str(bad)) == 2
    assert "mismatch" in capsys.readouterr().err


def test_parse_errors_exit_three(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": "1", "model": {"divisors": ["A"], "intersection": [[0.5]], "canonical": ["-3"]}}')
    assert run("classify", "--input", str(bad)) == 3
    assert "$.model.intersection[0][0]" in capsys.readouterr().err
    assert run("classify", "--input", str(tmp_path / "missing.json")) == 3
    bad.write_text('{"schema_version": "9"}')
    assert run("classify", "--input", str(bad)) == 3


def test_domain_error_exit_one(tmp_path, golden_dir, capsys):
    data = json.loads((golden_dir / "worked-pair.case.json").read_text())
    data["boundary"] = {"D1": "1", "D2": "1/2"}
    case = tmp_path / "lc.case.json"
    case.write_text(json.dumps(data))
    assert run("terminalize", "--input", str(case)) == 1
    assert run("pipeline", "--input", str(case)) == 1
    assert "[input]" in capsys.readouterr().err


def test_oracle_command(capsys):
    assert run("oracle", "--depth", "3", "--cases", "10", "--max-n", "5", "--span", "50") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["mismatches"] == [] and out["discrepancy_cases"] == 10


@pytest.mark.parametrize("module", ["logsurface"])
def test_module_entry_point(module):
    proc = subprocess.run([sys.executable, "-m", module, "semigroup", "--n", "1", "--m", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"][0]["decomposition"] == [1]
