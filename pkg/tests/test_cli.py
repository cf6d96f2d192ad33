from __future__ import annotations

import subprocess
import sys
from pathlib import Path

import pytest

from kampen.cli import main

DATA = Path(__file__).parent / "data"


def run(capsys: pytest.CaptureFixture[str], *argv: str) -> tuple[int, str]:
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def test_word_problem_fast_path(capsys) -> None:
    assert run(capsys, "decide-word", "--sort", "II", "--word", "abAB") == (0, "nontrivial (free fast path, k=0)\n")


def test_generate_then_check_family(capsys, tmp_path: Path) -> None:
    code, out = run(capsys, "gen-presentation", "--sort", "I.0", "--max-i", "0", "--out", tmp_path)
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["relators.txt", "step-0.txt"]
    code, out = run(capsys, "check-family", "--sort", "I.0", "--max-i", "0", tmp_path)
    assert code == 0
    assert out.splitlines()[0] == "family sort I.0 i<=0: ok"
    assert "[2] i=0 ok: j=1: longest piece 65 <= mu(4m+4)|u| = 130/1" in out


def test_check_family_catches_edited_file(capsys, tmp_path: Path) -> None:
    run(capsys, "gen-presentation", "--sort", "II", "--max-i", "0", "--out", tmp_path)
    step = tmp_path / "step-0.txt"
    lines = step.read_text().splitlines()
    lines[-1] = lines[-1].rsplit(" ", 1)[0] + " b^7"
    step.write_text("\n".join(lines) + "\n")
    code, out = run(capsys, "check-family", "--sort", "II", "--max-i", "0", tmp_path)
    assert code == 1 and "FAILED" in out
    assert "first mismatch at j=4" in out and "264 > 2067/8" in out


def test_params_reports_exact_fractions(capsys) -> None:
    code, out = run(capsys, "params", "--n", "1")
    assert code == 0
    assert out.splitlines()[0] == "n=1 lambda=1/40 mu=1/352 nu=1/8"


def test_params_zero_fails_second_bound(capsys) -> None:
    code, out = run(capsys, "params", "--n", "0")
    assert code == 1 and "231/320 < 19/44: False" in out


@pytest.mark.parametrize("argv, expected", [
    (("euler", DATA / "torus.txt"), "0\n"),
    (("classify", DATA / "torus.txt"), "orientable surface, genus 1, closed, euler 0\n"),
    (("genus", DATA / "commutator_diagram.txt"), "genus: 1\ncommutator length bound: 1\n"),
    (("validate-map", DATA / "disc.txt"), "valid map\n"),
    (("check-Y", DATA / "two_faces_smap.txt"), "Y holds\nrank 1: 0 components vs 2 faces -> ok\n"),
])
def test_structure_commands(capsys, argv: tuple, expected: str) -> None:
    assert run(capsys, *argv) == (0, expected)


def test_check_correct_and_special(capsys) -> None:
    args = (DATA / "two_faces_smap.txt", "--templates", DATA / "templates.txt")
    assert run(capsys, "check-correct", *args)[0] == 0
    code, out = run(capsys, "check-special", *args)
    assert code == 1 and "internal exceptional arc +0 +1 is extendible" in out


def test_hall(capsys) -> None:
    assert run(capsys, "hall", "--A", "x1,x2", "--B", "y", "--R", "x1:y;x2:y", "--w", "y:1") == (1, "deficiency: {x1, x2}\n")
    assert run(capsys, "hall", "--A", "x", "--B", "y", "--R", "x:y", "--w", "y:1")[0] == 0


def test_conjugacy(capsys) -> None:
    assert run(capsys, "decide-conj", "--x", "ab", "--y", "ba") == (0, "conjugate (branch annular, budget 23 edges)\n")


def test_witness_written(capsys, tmp_path: Path) -> None:
    out = tmp_path / "w.txt"
    code, _ = run(capsys, "decide-word", "--word", "abAB", "--relators", "ab", "--certified", "--witness-out", out)
    assert code == 0
    assert run(capsys, "validate-diagram", out, "--relators", "ab")[0] == 0


def test_undecided_exit_code(capsys) -> None:
    code, out = run(capsys, "decide-word", "--word", "abab", "--relators", "aabbb", "--timeout", "0.2")
    assert code == 2 and out.startswith("undecided")


def test_convert(capsys, tmp_path: Path) -> None:
    src = tmp_path / "w.txt"
    src.write_text("aaa\n")
    assert run(capsys, "convert", src, "--from", "literal", "--to", "runs") == (0, "a^3\n")
    text = (DATA / "commutator_diagram.txt").read_text()
    js = tmp_path / "d.json"
    run(capsys, "convert", DATA / "commutator_diagram.txt", "--from", "text", "--to", "json", "--out", js)
    assert run(capsys, "convert", js, "--from", "json", "--to", "text") == (0, text)


@pytest.mark.parametrize("argv", [
    ("decide-word",),
    ("no-such-command",),
    ("euler", "/nonexistent/file.txt"),
    ("params", "--n", "-1"),
])
def test_usage_errors(capsys, argv: tuple) -> None:
    assert main(list(argv)) == 3


def test_malformed_file_reports_location(capsys, tmp_path: Path) -> None:
    bad = tmp_path / "bad.txt"
    bad.write_text("vertices: [0]\nfoo: [1]\n")
    assert main(["euler", str(bad)]) == 3
    assert "line 2" in capsys.readouterr().err


def test_module_entry_point_is_deterministic() -> None:
    cmd = [sys.executable, "-m", "kampen", "decide-conj", "--x", "abAB", "--y", "BAba"]
    runs = [subprocess.run(cmd, capture_output=True, text=True, check=False) for _ in range(2)]
    assert runs[0].returncode == runs[1].returncode == 0
    assert runs[0].stdout == runs[1].stdout != ""
