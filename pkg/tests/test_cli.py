import json

import pytest

from chorc.cli import main

from conftest import golden_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(autouse=True)
def _no_color(monkeypatch):
    monkeypatch.setenv("CHORC_COLOR", "never")


def test_check_interfering(capsys):
    code, out, _ = run(capsys, "check", golden_path("interfering.chor"))
    assert code == 1
    lines = out.splitlines()
    assert len(lines) == 4
    assert all("interfering.chor:$: " in ln for ln in lines)


def test_check_clean_and_json(capsys):
    assert run(capsys, "check", golden_path("crawler.chor"))[0] == 0
    code, out, _ = run(capsys, "check", "--json", golden_path("interfering_sel.chor"))
    assert code == 1
    assert {v["kind"] for v in json.loads(out)} == {"SelTargetClash"}


def test_project_crawler(capsys, tmp_path):
    code, out, _ = run(capsys, "project", golden_path("crawler.chor"))
    assert code == 0
    assert [ln.split("|>")[0].strip(" |") for ln in out.splitlines()] == ["p", "s1", "s2"]
    dest = tmp_path / "out.net"
    assert run(capsys, "project", golden_path("crawler.chor"), "-o", dest)[0] == 0
    assert dest.read_text() == out


def test_project_unprojectable(capsys):
    code, out, _ = run(capsys, "project", "--json", golden_path("unprojectable.chor"))
    assert code == 1
    rec = json.loads(out)
    assert rec["kind"] == "MergeConflict" and rec["process"] == "q"


def test_run_seq_single_group(capsys, tmp_path):
    tr = tmp_path / "t.json"
    code, out, _ = run(capsys, "run", golden_path("atomic.chor"), "--sem", "seq",
                       "--state", golden_path("atomic.state"), "--trace", tr)
    assert code == 0
    rec = json.loads(tr.read_text())
    assert rec["status"] == "Terminated"
    assert [lbl["kind"] for lbl in rec["trace"]] == ["group"]
    assert "q.u = 1" in out and "p.v = 2" in out


def test_seq_and_conc_agree(capsys):
    finals = []
    for sem in ("seq", "conc"):
        code, out, _ = run(capsys, "run", golden_path("scatter_gather.chor"), "--sem", sem, "--seed", 4)
        assert code == 0
        finals.append(out.split("Terminated")[-1])
    assert finals[0] == finals[1]


def test_byte_identical(capsys):
    argv = ("run", golden_path("scatter_gather.chor"), "--sem", "conc", "--seed", 7)
    assert run(capsys, *argv) == run(capsys, *argv)
    argv = ("traces", golden_path("scatter_gather_2.chor"), "--max-steps", 10)
    assert run(capsys, *argv) == run(capsys, *argv)


def test_traces_json(capsys):
    code, out, _ = run(capsys, "traces", golden_path("scatter_gather.chor"), "--max-steps", 10)
    assert code == 0
    assert len(json.loads(out)) == 6


def test_simulate(capsys):
    assert run(capsys, "simulate", golden_path("deadlock.net"))[0] == 1
    code, out, _ = run(capsys, "simulate", golden_path("deadlock.net"), "--fuel", 3)
    assert "Stuck" in out


def test_simulate_projection(capsys, tmp_path):
    dest = tmp_path / "c.net"
    run(capsys, "project", golden_path("crawler.chor"), "-o", dest)
    code, out, _ = run(capsys, "simulate", dest, "--seed", 2)
    assert code == 0 and "Terminated" in out


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "check")[0] == 2
    assert run(capsys, "check", golden_path("crawler.chor"), "--bogus")[0] == 2
    assert run(capsys, "run", golden_path("crawler.chor"))[0] == 2
    assert run(capsys, "check", tmp_path / "missing.chor")[0] == 2
    bad = tmp_path / "bad.chor"
    bad.write_text("p.x -> ")
    code, _, err = run(capsys, "check", bad)
    assert code == 2 and "bad.chor:1:" in err
    assert run(capsys, "verify", "--props", "nope", "--random", 0)[0] == 2


def test_verify_files_and_json(capsys):
    code, out, _ = run(capsys, "verify", "--random", 3, "--props", "progress,epp", "--json",
                       golden_path("atomic.chor"), golden_path("loop.chor"))
    assert code == 0
    recs = json.loads(out)
    assert [r["property"] for r in recs] == ["progress", "epp"]
    assert recs[0]["instances"] == 6


def test_verify_text(capsys):
    code, out, _ = run(capsys, "verify", "--random", 2, "--props", "confluence")
    assert code == 0 and out.startswith("confluence: ok")


def test_color(capsys, monkeypatch):
    monkeypatch.setenv("CHORC_COLOR", "always")
    _, out, _ = run(capsys, "check", golden_path("interfering.chor"))
    assert out.startswith("\033[31m")
    monkeypatch.setenv("CHORC_COLOR", "never")
    _, out, _ = run(capsys, "check", golden_path("interfering.chor"))
    assert "\033" not in out
