from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from artifact import cli


def run(*argv):
    code, rep = cli.run_command(["--no-timestamp", *argv])
    return code, rep


def test_square_d2():
    code, rep = run("square", "--family", "D", "--rank", "2", "--a", "2", "--k", "1", "--n", "1")
    assert code == 0
    assert all(r.status in ("pass", "skip") for r in rep.results)
    assert any(r.status == "pass" for r in rep.results)


def test_orbits_c1_q2():
    code, rep = run("orbits", "--family", "C", "--m", "1", "--k", "1", "--q", "2")
    assert code == 0
    report = next(r for r in rep.results if r.name == "report")
    assert len(report.payload["rows"]) == 2


def test_symbols_hilbert():
    code, rep = run("symbols", "--field", "Qp:5", "--n", "4", "--hilbert", "2", "5")
    assert code == 0
    assert rep.results[0].payload["index"] == 1


def test_deterministic_output(capsys):
    argv = ["symbols", "--field", "Fq:7", "--n", "3", "--samples", "20", "--seed", "3"]
    cli.main(argv)
    a = json.loads(capsys.readouterr().out)
    cli.main(argv)
    b = json.loads(capsys.readouterr().out)
    assert a["timestamp"] and b["timestamp"]
    a.pop("timestamp"), b.pop("timestamp")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_schema(capsys):
    cli.main(["--no-timestamp", "rootdatum", "--family", "C", "--rank", "2"])
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) == {"command", "parameters", "timestamp", "results"}
    assert doc["command"] == "rootdatum" and doc["timestamp"] is None
    for r in doc["results"]:
        assert set(r) == {"name", "status", "payload"} and r["status"] in cli.STATUSES


@pytest.mark.parametrize("argv", [[], ["bogus"], ["rootdatum", "--family", "Z", "--rank", "1"],
                                  ["rootdatum", "--family", "A"]])
def test_usage_errors(argv, capsys):
    code, rep = cli.run_command(argv)
    assert code == 2 and rep is None
    assert "usage error" in capsys.readouterr().err


def test_bad_input_exits_2():
    code, rep = run("orbits", "--family", "A", "--m", "1", "--q", "3")
    assert code == 2 and rep.results[-1].payload["type"] == "UnsupportedFamily"
    code, _ = run("qform", "--family", "B", "--rank", "2", "--a", "1")
    assert code == 2
    code, _ = run("orbits", "--family", "C", "--m", "1", "--k", "2", "--q", "3", "--max-states", "10")
    assert code == 2


def test_failed_check_exits_1(monkeypatch):
    def bad(a, rep):
        rep.add("always fails", False)
    monkeypatch.setitem(cli.COMMANDS, "lemmas", bad)
    code, rep = run("lemmas")
    assert code == 1 and not rep.ok


def test_tsv(capsys):
    cli.main(["--no-timestamp", "--tsv", "orbits", "--family", "C", "--m", "1", "--q", "3"])
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "name\tstatus\tpayload"
    i = next(k for k, l in enumerate(lines) if l.startswith("report\t"))
    assert "size" in lines[i].split("\t")
    assert len([l for l in lines[i + 1:] if l.startswith("\t\t")]) == 2


def test_output_file(tmp_path):
    out = tmp_path / "r.json"
    code, _ = run("-o", str(out), "qform", "--family", "C", "--rank", "2", "--a", "1", "--n", "4")
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["results"][-1]["payload"]["n_Q"] == 2


def test_lemmas_pass():
    code, rep = run("lemmas", "--samples", "10")
    assert code == 0, [r for r in rep.results if r.status == "fail"]


def _probe(env_extra):
    env = dict(os.environ, **env_extra)
    out = subprocess.run([sys.executable, "-c", "import artifact.kernels as k; print(k.COMPILED)"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_pure_fallback_selected():
    assert _probe({"BDCOVER_PURE": "1"}) == "False"


def test_console_script_runs():
    out = subprocess.run([sys.executable, "-m", "artifact.cli", "--no-timestamp", "symbols",
                          "--field", "Qp:5", "--n", "4", "--hilbert", "2", "5"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["results"][0]["payload"]["index"] == 1
