import json
import math

import pytest

from besovlab.harness import (
    SUITES,
    CheckReport,
    SuiteConfig,
    check_seed,
    emit_report,
    parse_config,
    render_report,
    run_suite,
)
from besovlab.harness.cli import main


def test_parse_config_round_trip():
    cfg = parse_config("""
        # comment
        suites = scaling, hardy
        corpus.names = bump, tent
        corpus.dim = 2
        params = 0.3/1/1; 0.5/0.9/0.9
        tolerance.hardy = 0.01
        seed = 7
    """)
    assert cfg.suites == ("scaling", "hardy")
    assert [P.dim for P in cfg.params] == [2, 2]
    assert cfg.tolerances["hardy"] == 0.01
    assert cfg.tolerances["scaling"] == 0.03
    assert cfg.corpus.seed == 7
    assert cfg.echo()["params"] == ["0.3/1/1", "0.5/0.9/0.9"]


@pytest.mark.parametrize("text,msg", [
    ("colour = red", "unknown key"),
    ("seed = 1\nseed = 2", "duplicate"),
    ("suites = nonsense", "unknown suite"),
    ("params = 0.5/2/2", "p < n/beta"),
    ("tolerance.scaling = 0", "positive"),
    ("just words", "key = value"),
])
def test_parse_config_errors(text, msg):
    with pytest.raises(ValueError, match=msg):
        parse_config(text)


def test_empty_suite_list():
    assert run_suite(SuiteConfig(suites=())) == []


def test_empty_json_report():
    doc = json.loads(render_report([], "json"))
    assert doc["checks"] == []
    assert doc["summary"] == {"total": 0, "passed": 0}
    assert "version" in doc


def test_csv_one_row(tmp_path):
    r = CheckReport("x/y", "0.3/1/1", 2.0, 4.0, 0.5, 0.03, True, None, 0, 9, ("a", "b"))
    path = tmp_path / "r.csv"
    emit_report([r], "csv", str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == ("check_id,params,lhs,rhs,ratio,tolerance,pass,"
                        "stderr_mc,runtime_ms,seed,flags")
    assert lines[1] == "x/y,0.3/1/1,2.0,4.0,0.5,0.03,true,,0,9,a|b"


def test_non_finite_values_become_null():
    r = CheckReport("x", "-", math.inf, 1.0, math.nan, 0.1, False)
    doc = json.loads(render_report([r], "json"))
    assert doc["checks"][0]["lhs"] is None and doc["checks"][0]["ratio"] is None


def test_check_seeds_are_stable_and_distinct():
    a = check_seed(42, "scaling/besov/bump", "0.3/1/1")
    assert a == check_seed(42, "scaling/besov/bump", "0.3/1/1")
    assert a != check_seed(42, "scaling/besov/tent", "0.3/1/1")
    assert a != check_seed(43, "scaling/besov/bump", "0.3/1/1")
    assert 0 <= a < 2**64


def test_scaling_suite_passes():
    reports = run_suite(SuiteConfig(suites=("scaling",), seed=42))
    assert reports and all(r.passed for r in reports)
    assert {r.check_id.split("/")[1] for r in reports} == {"besov", "lorentz", "perimeter"}


def test_report_only_rows_are_flagged():
    reports = run_suite(SuiteConfig(suites=("isocap_report",)))
    assert all(r.passed and "report_only" in r.flags for r in reports)
    assert all("one_sided_bound" in r.flags for r in reports)


def test_thread_count_does_not_change_report():
    cfg = SuiteConfig(suites=("lemma21", "rearrange", "coarea"))
    one = render_report(run_suite(cfg), "json", cfg.echo())
    many = render_report(run_suite(cfg.with_overrides(threads=4)), "json", cfg.echo())
    assert one == many


def test_timing_is_opt_in():
    reports = run_suite(SuiteConfig(suites=("coarea",), timing=True))
    assert any(r.runtime_ms > 0 for r in reports)
    assert all(r.runtime_ms == 0 for r in run_suite(SuiteConfig(suites=("coarea",))))


def test_every_suite_is_known():
    assert len(SUITES) == 9
    with pytest.raises(ValueError):
        SuiteConfig(suites=("lemma99",))


def test_cli_verify_and_compute(tmp_path, capsys):
    cfg = tmp_path / "c.txt"
    cfg.write_text("suites = hardy\ncorpus.names = bump\n")
    out = tmp_path / "r.json"
    assert main(["verify", "--config", str(cfg), "--out", str(out), "--seed", "5"]) == 0
    doc = json.loads(out.read_text())
    assert doc["config_echo"]["seed"] == 5
    assert doc["summary"]["total"] == doc["summary"]["passed"] > 0

    assert main(["compute", "perimeter", "--beta", "0.5", "--samples", "2000"]) == 0
    assert json.loads(capsys.readouterr().out)["perimeter"] == pytest.approx(8, rel=0.05)
    assert main(["compute", "besov", "--beta", "0.5", "--p", "2"]) == 2
    assert "p < n/beta" in capsys.readouterr().err


def test_cli_sweep_emits_csv(capsys):
    assert main(["sweep", "--param", "beta", "--from", "0.2", "--to", "1.2", "--steps", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("beta,p,q,regime")
    assert len(lines) == 4
    assert "regime A needs beta < n" in lines[-1]


def test_threads_env(monkeypatch, tmp_path):
    monkeypatch.setenv("BESOVLAB_THREADS", "3")
    cfg = tmp_path / "c.txt"
    cfg.write_text("suites = rearrange\n")
    out = tmp_path / "r.csv"
    assert main(["verify", "--config", str(cfg), "--out", str(out), "--format", "csv"]) == 0
    assert out.read_text().startswith("check_id,")
