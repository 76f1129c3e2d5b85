import json

import pytest
from click.testing import CliRunner

from rlcm_kms.cli import main


def invoke(*args, env=None):
    return CliRunner().invoke(main, list(args), env=env or {})


def report(result):
    return json.loads(result.output)


def test_zeta_value():
    r = invoke("zeta", "--irr", "2,3", "--beta", "3", "--no-timestamp")
    assert r.exit_code == 0
    assert report(r)["results"][0]["value"]["value"] == {"num": 3, "den": 2}


def test_classify_bs23_at_one():
    r = invoke("classify", "--family", "bs", "--c", "2", "--d", "3", "--beta", "1", "--no-timestamp")
    assert r.exit_code == 0
    items = {i["key"]: i for i in report(r)["results"]}
    assert items["uniqueness"]["verdict"] == "holds"
    assert items["uniqueness"]["payload"]["route"] == "2a"


def test_undecided_exits_zero_with_warning():
    r = invoke("classify", "--family", "bs", "--c", "3", "--d", "3", "--beta", "1", "--no-timestamp")
    assert r.exit_code == 0
    assert "uniqueness: undecided" in report(r)["warnings"]


def test_failed_check_exits_one():
    r = invoke("check-admissible", "--family", "bs", "--c", "3", "--d", "1", "--no-timestamp")
    assert r.exit_code == 1


def test_report_schema_and_determinism():
    args = ("kappa", "--family", "bs", "--c", "3", "--d", "3", "--a", "b^3", "--b", "1", "--level", "9")
    a, b = invoke(*args, "--no-timestamp"), invoke(*args, "--no-timestamp")
    assert a.output == b.output
    rep = report(a)
    assert set(rep) == {"schema_version", "config", "results", "warnings"}
    assert rep["results"][0]["enclosure"] == {"lo": {"num": 0, "den": 1}, "hi": {"num": 1, "den": 1}}
    assert "generated_at" in report(invoke(*args))


def test_thread_count_does_not_change_the_report():
    args = ("kappa", "--family", "bs", "--a", "b", "--b", "b^2", "--level", "27", "--no-timestamp")
    assert invoke(*args, env={"RLCM_KMS_THREADS": "4"}).output == invoke(*args).output


@pytest.mark.parametrize("bad", ["0", "-1", "many"])
def test_bad_thread_count_is_a_usage_error(bad):
    r = invoke("describe", "--family", "bs", env={"RLCM_KMS_THREADS": bad})
    assert r.exit_code == 2


def test_empty_config_is_a_validation_error(tmp_path):
    cfg = tmp_path / "empty.toml"
    cfg.write_text("")
    r = invoke("describe", "--config", str(cfg))
    assert r.exit_code == 2
    assert "semigroup" in r.output


def test_config_parse_error_reports_position(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("[semigroup\nfamily = 'bs'\n")
    r = invoke("describe", "--config", str(cfg))
    assert r.exit_code == 2
    assert "line 1" in r.output


def test_config_file_drives_the_job(tmp_path):
    cfg = tmp_path / "job.toml"
    cfg.write_text('command = "kms-eval"\n[semigroup]\nfamily = "bs"\nc = 2\nd = 3\n[parameters]\nbeta = 2\ns = "a"\nt = "a"\n')
    r = invoke("kms-eval", "--config", str(cfg), "--no-timestamp")
    assert r.exit_code == 0, r.output
    assert report(r)["results"][0]["value"]["value"] == {"num": 1, "den": 9}


def test_emitted_config_round_trips(tmp_path):
    out = tmp_path / "c.toml"
    r = invoke("describe", "--family", "dilation", "--matrix", "1,1;1,-1", "--emit-config", str(out), "--no-timestamp")
    assert r.exit_code == 0
    again = invoke("describe", "--config", str(out), "--no-timestamp")
    assert report(again)["results"] == report(r)["results"]


def test_csv_export(tmp_path):
    path = tmp_path / "z.csv"
    r = invoke("zeta", "--irr", "2", "--beta", "2", "--cutoff", "8", "--csv", str(path), "--no-timestamp")
    assert r.exit_code == 0
    assert path.read_text().splitlines() == ["n,partial_sum", "1,1", "2,3/2", "4,7/4", "8,15/8"]


def test_output_file(tmp_path):
    path = tmp_path / "r.json"
    r = invoke("ground", "--family", "bs", "--s", "b", "--t", "b", "-o", str(path), "--no-timestamp")
    assert r.exit_code == 0 and r.output == ""
    assert json.loads(path.read_text())["results"][0]["value"]["value"] == {"num": 1, "den": 1}


def test_beta_below_one_is_refused():
    r = invoke("kms-eval", "--family", "bs", "--beta", "1/2", "--s", "b", "--t", "b")
    assert r.exit_code == 2


def test_sizing_error_exit_code():
    r = invoke("verify-rep", "--family", "nxp", "--level-cap", "100000", "--core-cap", "6")
    assert r.exit_code == 3


def test_verify_rep_with_reconstruction():
    r = invoke("verify-rep", "--family", "bs", "--beta", "2", "--index", "3", "--no-timestamp")
    assert r.exit_code == 0
    recon = report(r)["results"][-1]["reconstruction"]
    assert recon["passed"] and recon["zeta_I"] == {"num": 3, "den": 2}


def test_action_on_wreath_example():
    r = invoke("action", "--family", "ffs", "--q", "3", "--units", "2", "--no-timestamp")
    verdicts = {e["property"]: e["verdict"] for e in report(r)["results"]}
    assert verdicts == {"Faithful": "Holds", "AlmostFree": "Violated", "FiniteStateProp": "Holds"}


def test_unparseable_element():
    r = invoke("kms-eval", "--family", "bs", "--beta", "2", "--s", "zz", "--t", "b")
    assert r.exit_code == 2
