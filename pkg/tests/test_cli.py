from __future__ import annotations

import json
from pathlib import Path

import pytest

from nicelie.cli import EXIT_ALARM, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, main, run
from nicelie.export import read_dot

from support import table_rows


def write_table(path: Path, n: int, skip: int = -1) -> Path:
    lines = [f"{name}  {text}" for i, (name, text, _) in enumerate(table_rows(n)) if i != skip]
    path.write_text("# transcribed rows\n" + "\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_classify_table_counts():
    for n, count in ((3, 2), (4, 3), (5, 9)):
        code, text, _ = run(["classify", "--dim", str(n)])
        assert code == EXIT_OK
        assert text.rstrip().endswith(f"# {count} families")


def test_classify_json_and_dot():
    code, text, _ = run(["classify", "--dim", "4", "--format", "json"])
    doc = json.loads(text)
    assert code == EXIT_OK and doc["dimension"] == 4 and len(doc["families"]) == 3
    code, text, _ = run(["classify", "--dim", "4", "--format", "dot"])
    assert len(read_dot(text)) == 6


def test_type_filter():
    code, text, _ = run(["classify", "--dim", "6", "--type", "3,2,1"])
    assert code == EXIT_OK
    names = [line.split()[0] for line in text.splitlines() if not line.startswith("#")]
    assert names and all(n.startswith("631:") for n in names)


def test_diagrams_command():
    code, text, _ = run(["diagrams", "--dim", "5"])
    assert code == EXIT_OK and text.rstrip().endswith("# 9 nice diagrams")


def test_usage_errors(capsys):
    assert main(["classify"]) == EXIT_USAGE
    assert main(["classify", "--dim", "0"]) == EXIT_USAGE
    assert main(["classify", "--dim", "4", "--type", "2,1"]) == EXIT_USAGE
    assert main(["classify", "--dim", "4", "--format", "xml"]) == EXIT_USAGE
    assert main(["bogus"]) == EXIT_USAGE
    assert main(["check", "/nonexistent/file"]) == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_alarm_exit_code(monkeypatch, capsys):
    import nicelie.cli as cli
    from nicelie.classify import ClassificationAlarm

    def boom(*args, **kwargs):
        raise ClassificationAlarm("forced")

    monkeypatch.setattr(cli, "classify_dimension", boom)
    assert main(["classify", "--dim", "3"]) == EXIT_ALARM
    assert "alarm" in capsys.readouterr().err


def test_check_reports(tmp_path):
    path = tmp_path / "in.txt"
    path.write_text(
        "# examples\n"
        "631:6  0,0,0,e^{12},e^{13},e^{34}+e^{25}\n"
        "0,0,e^{12},e^{12}\n"
        "0,0,(1-λ) e^{12},e^{13},λ e^{14}+e^{23},e^{24}+e^{15},e^{34}+e^{25}+e^{16}\n"
        "0,0,0,e^{12},e^{13},e^{34}+2e^{25}\n", encoding="utf-8")
    code, text, _ = run(["check", str(path)])
    lines = text.splitlines()
    assert code == EXIT_OK
    assert lines[0].startswith("631:6: nice, Jacobi OK, LCS 631")
    assert "not nice: pair {1,2} maps to two targets" in lines[1]
    assert "nice, Jacobi OK, LCS 754321" in lines[2]
    assert "Jacobi identity fails" in lines[3]


def test_check_parameter_value(tmp_path):
    path = tmp_path / "in.txt"
    path.write_text("0,0,1/2 e^{12},e^{13},1/2 e^{14}+e^{23},e^{24}+e^{15},"
                    "e^{34}+e^{25}+e^{16}\n", encoding="utf-8")
    code, text, _ = run(["check", str(path), "--diagnostics"])
    assert "nice, Jacobi OK" in text and "strict covering rule" in text


def test_compare_table_six_against_classification(tmp_path):
    table = write_table(tmp_path / "t6.txt", 6)
    out = tmp_path / "ours.txt"
    assert main(["classify", "--dim", "6", "--out", str(out)]) == EXIT_OK
    code, text, _ = run(["compare", str(table), str(out), "--at", "λ=2"])
    assert code == EXIT_OK, text
    assert text.rstrip().endswith("36 matched, 0 unmatched in A, 0 unmatched in B: "
                                  "perfect matching")


def test_compare_reports_missing_row(tmp_path):
    full = write_table(tmp_path / "full.txt", 5)
    short = write_table(tmp_path / "short.txt", 5, skip=3)
    code, text, _ = run(["compare", str(full), str(short)])
    assert code == EXIT_MISMATCH
    missing = table_rows(5)[3][0]
    assert f"only in {full}: {missing}" in text


def test_compare_inequivalent_bases(tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("631:5a  0,0,0,e^{12},e^{13},e^{24}+e^{35}\n", encoding="utf-8")
    b.write_text("631:5b  0,0,0,-e^{12},e^{13},e^{35}+e^{24}\n", encoding="utf-8")
    assert main(["compare", str(a), str(b)]) == EXIT_MISMATCH


@pytest.mark.parametrize("fmt", ["table", "json", "dot"])
def test_output_independent_of_jobs(tmp_path, fmt):
    outs = []
    for jobs in (1, 8):
        path = tmp_path / f"out{jobs}.{fmt}"
        assert main(["classify", "--dim", "6", "--jobs", str(jobs), "--format", fmt,
                     "--out", str(path)]) == EXIT_OK
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
