import io
import json
import shutil
import subprocess

import pytest

from khsq.cli import build_parser, config_of, main
from khsq.harness import FIXTURE_DIR


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_homology_unknot_table():
    code, text = run("homology", str(FIXTURE_DIR / "unknot.pd"))
    assert code == 0
    rows = [line.split("\t") for line in text.splitlines() if line and line[0] != "#"]
    assert rows[0] == ["i", "j", "dim"]
    assert rows[1:] == [["0", "-1", "1"], ["0", "1", "1"]]


def test_homology_json_inline_code():
    code, text = run("homology", "PD[X(1,3,2,4),X(3,1,4,2)]", "--format", "json")
    assert code == 0
    body = json.loads(text)
    assert body["schema"] == "khsq.homology/1"
    assert sum(r["dim"] for r in body["rows"]) == 4


def test_inline_unknot_needs_count():
    assert run("homology", "PD[]")[0] == 2
    code, text = run("homology", "PD[]", "--unknots", "2", "--format", "json")
    assert code == 0
    assert sum(r["dim"] for r in json.loads(text)["rows"]) == 4


def test_input_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.pd"
    bad.write_text("PD[X(1,4,2)]")
    assert run("homology", str(bad))[0] == 2
    assert "3 entries" in capsys.readouterr().err
    assert run("homology", str(tmp_path / "missing.pd"))[0] == 2
    assert "no such file" in capsys.readouterr().err
    assert run("verify")[0] == 2
    assert run("verify", "4_1", "--suite")[0] == 2
    assert run("frobnicate")[0] == 2


def test_sq2_both_methods_agree_on_trefoil():
    code, text = run("sq", "trefoil_right", "--op", "sq2", "--method", "both", "--format", "json")
    assert code == 0
    body = json.loads(text)
    assert body["agree"] is True
    for r in body["rows"]:
        assert r["moran"] == r["ls"]


def test_sq2_text_on_t3_4():
    code, text = run("sq", "t3_4", "--method", "both", "--matching", "nested")
    assert code == 0
    assert "sq2: (2,11) -> (4,11)" in text
    assert "agree" in text


def test_sq1_trefoil_has_one_entry():
    code, text = run("sq", "trefoil_right", "--op", "sq1", "--format", "json")
    rows = json.loads(text)["rows"]
    assert code == 0
    assert sum(x for r in rows for line in r["bockstein"] for x in line) == 1


def test_verify_single_fixture_text():
    code, text = run("verify", "trefoil_right", "--format", "text", "--samples", "4")
    assert code == 0
    assert "fixture trefoil_right: PASS" in text
    assert "# 1/1 fixtures pass" in text


def test_verify_defaults_to_json_and_is_deterministic():
    args = ("verify", "hopf_positive", "--seed", "4")
    c1, t1 = run(*args)
    c2, t2 = run(*args)
    assert c1 == c2 == 0
    assert t1 == t2
    body = json.loads(t1)
    seeds = {c["seed"] for c in body["fixtures"][0]["classes"]}
    assert seeds == {None, 5, 6, 7}


def test_verify_suite_without_identities():
    code, text = run("verify", "--suite", "--no-identities", "--reorders", "1", "--matching", "disjoint")
    assert code == 0
    body = json.loads(text)
    assert body["passed"] and len(body["fixtures"]) == len(list(FIXTURE_DIR.glob("*.pd")))


def test_verify_reports_injected_fault(capsys):
    code, _ = run("verify", "trefoil_right", "--inject", "face_bijection", "--no-identities")
    assert code == 1
    assert "verification failed" in capsys.readouterr().err


@pytest.mark.parametrize("what", ["functor", "spans", "chords"])
def test_dump(what, tmp_path):
    argv = ["dump", "trefoil_right", "--what", what]
    if what == "chords":
        argv += ["--svg-dir", str(tmp_path)]
    code, text = run(*argv)
    assert code == 0 and text
    if what == "functor":
        assert json.loads(text)["schema"] == "khsq.functor/1"
    if what == "chords":
        assert "chord\ta\tb" in text
        assert list(tmp_path.glob("*.svg"))


def test_config_and_jobs_env(monkeypatch):
    monkeypatch.setenv("KHSQ_JOBS", "3")
    args = build_parser().parse_args(["verify", "--suite"])
    cfg = config_of(args)
    assert (cfg.command, cfg.jobs, cfg.fmt, cfg.reorders) == ("verify", 3, "json", 3)
    monkeypatch.setenv("KHSQ_JOBS", "lots")
    assert config_of(build_parser().parse_args(["verify", "--suite"])).jobs == 1
    assert config_of(build_parser().parse_args(["homology", "x"])).fmt == "text"


@pytest.mark.skipif(shutil.which("khsq") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["khsq", "homology", "unknot"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "0\t1\t1" in proc.stdout
