from __future__ import annotations

import subprocess
import sys

import pytest

from branchbpa.cli import main

from conftest import CORPUS

DOUBLE = "vars: X\nacts: a b\nX -a-> X X\nX -b->\n"
TAU_PAIR = "vars: X Y\nacts: a\nX -tau-> Y\nY -a->\n"
HIT = "states0: s\ninit: s\nfinal-value: 1\ns -1-> final\n"


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return _write


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_bisim_equivalent(capsys, write):
    code, out = run(capsys, "bisim", write("d.bpa", TAU_PAIR), "X", "Y", "--mode", "branching")
    assert code == 0
    assert out.splitlines()[0] == "Equivalent"


def test_bisim_inequivalent_with_strategy(capsys, write):
    code, out = run(capsys, "bisim", write("d.bpa", TAU_PAIR), "X", "", "--strategy")
    assert code == 1
    assert "attacker strategy:" in out
    assert out.splitlines()[-1].startswith("reason: ")


def test_bisim_undecided(capsys, write):
    code, out = run(capsys, "bisim", write("d.bpa", DOUBLE), "X", "X X", "--cap", "40")
    assert code == 2
    assert out.splitlines()[0] == "Undecided"
    assert out.splitlines()[-1].startswith("reason: ")


def test_bisim_dot(capsys, write, tmp_path):
    dot = tmp_path / "c.dot"
    code, _ = run(capsys, "bisim", write("d.bpa", TAU_PAIR), "X", "Y", "--dot", str(dot))
    assert code == 0 and dot.read_text().startswith("digraph")


def test_regular_witness(capsys, write):
    code, out = run(capsys, "regular", write("d.bpa", DOUBLE), "X")
    assert code == 1
    assert out.splitlines()[:2] == ["NotRegular", "witness from position 0:"]
    assert "(X,{})  <- loop start" in out
    assert out.splitlines()[-1].startswith("reason: ")


def test_regular_positive(capsys, write):
    code, out = run(capsys, "regular", write("d.bpa", "vars: X\nacts: a b\nX -a-> X\nX -b->\n"), "X")
    assert (code, out) == (0, "Regular\n")


def test_verify_hit(capsys, write):
    code, out = run(capsys, "verify", "hor", write("g.hor", HIT))
    assert code == 0
    assert out.splitlines() == ["oracle=Player0", "branching=Equivalent", "weak=Equivalent", "verified"]


def test_verify_qsat(capsys):
    code, out = run(capsys, "verify", "qsat", str(CORPUS / "qsat" / "f01_true.qsat"))
    assert code == 0
    assert out.splitlines() == ["oracle=true", "branching=Equivalent", "weak=Equivalent",
                                "regular=Regular/Regular", "verified"]


def test_check_and_rd(capsys):
    counter = str(CORPUS / "bpa" / "counter_like.bpa")
    code, out = run(capsys, "check", counter)
    assert code == 0 and out.splitlines()[-1] == "normed"


def test_rd_and_bnorm(capsys, write, tmp_path):
    from branchbpa.core import print_system
    from branchbpa.counter import gen_counter
    path = write("c.bpa", print_system(gen_counter(2)))
    assert run(capsys, "rd", path, "B2_1 B1_0") == (0, "{Z1_0, Z2_1}\n")
    code, out = run(capsys, "rd", path, "--tree")
    assert code == 0 and out.splitlines()[-1] == "realizable sets: 9"
    assert run(capsys, "bnorm", path, "Z1_1", "--suffix-set", "{Z1_1}") == (0, "0\n")
    assert run(capsys, "bnorm", path, "Z1_1", "--suffix-set", "{}") == (0, "1\n")
    code, out = run(capsys, "bnorm", path, "B2_1 B1_0", "--path")
    assert code == 0 and out.splitlines()[0] == "2"


def test_rdgraph(capsys, write):
    code, out = run(capsys, "rdgraph", write("d.bpa", DOUBLE), "--edges")
    assert code == 0
    assert out.splitlines() == ["nodes: 1  edges: 1  growing: 1", "(X,{}) -1-> (X,{})", "growing (X,{})"]


def test_reduce_and_solve(capsys, write, tmp_path):
    out_path = tmp_path / "r.bpa"
    code, out = run(capsys, "reduce", "hor", write("g.hor", HIT), "-o", str(out_path))
    assert code == 0 and out_path.read_text().startswith("#@ ")
    code, out = run(capsys, "check", str(out_path))
    assert code == 0
    assert run(capsys, "solve", "hor", write("g.hor", HIT)) == (0, "Player0\n")
    code, out = run(capsys, "solve", "qsat", str(CORPUS / "qsat" / "f02_false.qsat"))
    assert code == 1 and out.startswith("false\n")


def test_game_script(capsys, write):
    script = write("answers.txt", "0\n")
    code, out = run(capsys, "game", write("d.bpa", "vars: X Y\nacts: a b\nX -a->\nY -b->\n"), "X", "Y",
                    "--role", "defender", "--script", script)
    assert code == 1
    assert "round 1 | defender | stuck; attacker wins | (X, Y)" in out


@pytest.mark.parametrize("argv, code", [
    (["bisim"], 64),
    (["frobnicate"], 64),
    (["bisim", "/nonexistent.bpa", "X", "Y"], 66),
])
def test_usage_and_missing_files(capsys, argv, code):
    with pytest.raises(SystemExit) as info:
        sys.exit(main(argv))
    assert info.value.code == code
    assert "reason:" in capsys.readouterr().out


def test_parse_errors(capsys, write):
    code, out = run(capsys, "check", write("bad.bpa", "vars: X\nacts: a\nX -a-> Y\n"))
    assert code == 65
    assert out.startswith("reason: parse error: 3:8:")
    code, out = run(capsys, "solve", "hor", write("bad.hor", "states0: s\ninit: s\nfinal-value: 1\ns -3-> final\n"))
    assert code == 65
    code, out = run(capsys, "bisim", write("d.bpa", DOUBLE), "X", "W")
    assert code == 65 and out.startswith("reason:")


def test_unnormed_regular(capsys, write):
    code, out = run(capsys, "regular", write("u.bpa", "vars: X\nacts: a\nX -a-> X\n"), "X")
    assert code == 65 and "unnormed" in out


def test_deterministic_subprocess():
    argv = [sys.executable, "-m", "branchbpa.cli", "verify", "qsat", str(CORPUS / "qsat" / "f06_two.qsat")]
    first = subprocess.run(argv, capture_output=True, text=True)
    second = subprocess.run(argv, capture_output=True, text=True)
    assert first.returncode == 0
    assert first.stdout == second.stdout
