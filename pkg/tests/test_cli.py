from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from hexforge.cli import GRAMMAR, main, parse_system_spec


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_system_shorthand():
    assert parse_system_spec("H1/4") == {"kind": "OneF", "p": 2, "k_F": 2}
    assert parse_system_spec("H2/2") == {"kind": "ThreeF", "p": 2, "k_F": 1}
    assert parse_system_spec("H4/9") == {"kind": "OneF", "p": 3, "k_F": 2}


def test_act(capsys):
    code, out, _ = run(capsys, "--system", "H1/2", "act", "--word", "x4(1)", "--element", "(inf)")
    assert code == 0 and out == "(inf)\n"
    code, out, _ = run(capsys, "act", "--system", "H1/2", "--word", "s1", "--element", "[inf]", "--json")
    assert code == 0 and json.loads(out)["image"] == "[0]"


def test_classify_json(capsys):
    code, out, _ = run(capsys, "--system", "H1/2", "--no-timestamp", "classify", "--word", "x1(1);s1")
    doc = json.loads(out)
    assert code == 0
    rep = doc["report"]
    assert (rep["classification"], rep["order"], rep["fixed"]["structure"]) == ("point_domestic", 3, "ovoid")
    assert {"system", "seed", "budget", "version"} <= set(doc["header"])
    assert "timestamp" not in doc["header"]


def test_theorem1_reducible_branch(capsys, tmp_path):
    cfg = tmp_path / "h14.json"
    cfg.write_text(json.dumps({"kind": "OneF", "p": 2, "k_F": 2}))
    code, out, _ = run(capsys, "--config", str(cfg), "theorem1")
    doc = json.loads(out)
    c = {x["id"]: x for x in doc["clauses"]}
    assert code == 0
    assert c["c_theta_point_domestic"]["witness"]["branch"] == "2b_reducible_large_full_subhexagon"
    assert "timestamp" in doc["header"] and "timings" in doc
    assert any(p.name.startswith("hexagon-") for p in tmp_path.iterdir())


def test_checks_exit_zero(capsys):
    for cmd in (["build"], ["verify-axioms"], ["identities"], ["relations"]):
        code, out, _ = run(capsys, "--system", "H1/2", *cmd)
        assert code == 0, cmd
        json.loads(out)


def test_export(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(capsys, "--system", "H1/2", "--no-timestamp", "export", "--format", "json", "-o", str(path))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert (len(doc["points"]), len(doc["lines"]), len(doc["incidences"])) == (63, 63, 189)
    code, out, _ = run(capsys, "--system", "H1/2", "export", "--format", "dot")
    assert code == 0 and out.startswith("graph hexagon {")


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--system", "H1/2", "export", "--format", "xml"])
    assert exc.value.code == 2
    code, _, err = run(capsys, "--system", "H1/2", "act", "--word", "x9(1)", "--element", "(inf)")
    assert code == 2 and GRAMMAR.splitlines()[0] in err
    code, _, err = run(capsys, "--system", "H1/2", "act", "--word", "x4(1)", "--element", "(1,1,1,1,1,1)")
    assert code == 2
    code, _, err = run(capsys, "classify", "--word", "s1")
    assert code == 2 and "no system" in err
    code, _, _ = run(capsys, "--system", "H1/6", "build")
    assert code == 2
    code, _, _ = run(capsys)
    assert code == 2


def test_check_failure_exit_one(capsys):
    code, out, err = run(capsys, "--system", "H2/2", "--budget", "1", "search-exceptional", "--mode", "random")
    assert code == 1 and "FAIL" in err
    assert json.loads(out)["findings"]["found"] is False


def test_config_command_and_seed(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"system": {"kind": "OneF", "p": 2}, "seed": 5, "budget": 20000,
                               "command": "search-exceptional", "args": {"mode": "random"}}))
    code, out, _ = run(capsys, "--config", str(cfg), "--no-timestamp")
    doc = json.loads(out)
    assert code == 0 and doc["header"]["seed"] == 5 and doc["header"]["budget"] == 20000
    assert doc["findings"]["seed"] == 5 and doc["findings"]["found"]


def test_console_script_and_threads_env(tmp_path):
    env = dict(os.environ, HEXFORGE_THREADS="1")
    out = subprocess.run([sys.executable, "-m", "hexforge.cli", "--system", "H1/2", "act", "--word", "x1(1);s1",
                          "--element", "(0,0,0,0,0)"], capture_output=True, text=True, env=env, check=False)
    assert out.returncode == 0 and out.stdout.startswith("(")
