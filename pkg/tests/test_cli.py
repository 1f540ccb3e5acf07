"""Command-line interface: exit codes, output formats, replicas."""

import csv
import io
import json
import os

import pytest

from tscls.cli import main

LAC = os.path.join(os.path.dirname(__file__), os.pardir, "models",
                   "lac_operon.tscls")

TINY = """\
model tiny
const k = 1.0

rule change {
  lhs: a | $X
  rhs: b | $X
  count $X { t_a -> n }
  rate: (n + 1) * k
}

init: a | a
observe a, b
run { seed: 7, tmax: 1000.0, max_steps: 100, samples: 4 }
"""


@pytest.fixture
def tiny(tmp_path):
    path = tmp_path / "tiny.tscls"
    path.write_text(TINY, encoding="utf-8")
    return str(path)


class TestCheck:
    def test_valid_model(self, capsys):
        assert main(["check", LAC]) == 0
        assert capsys.readouterr().out \
            == "lac_operon: 15 rules, 20 elements\n"

    def test_invalid_model(self, tiny, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("TSCLS_COLOR", "0")
        bad = tmp_path / "bad.tscls"
        bad.write_text(TINY.replace("rhs: b | $X", "rhs: b | $Z"),
                       encoding="utf-8")
        assert main(["check", str(bad)]) == 1
        err = capsys.readouterr().err
        assert err.startswith("error:") and "$Z" in err

    def test_syntax_error(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("TSCLS_COLOR", "0")
        bad = tmp_path / "bad.tscls"
        bad.write_text("model broken\ninit: a |\n", encoding="utf-8")
        assert main(["check", str(bad)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_file(self, capsys, monkeypatch):
        monkeypatch.setenv("TSCLS_COLOR", "0")
        assert main(["check", "/nonexistent/model.tscls"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_usage_error_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2


class TestColor:
    def test_forced_on(self, capsys, monkeypatch):
        monkeypatch.setenv("TSCLS_COLOR", "1")
        main(["check", "/nonexistent/model.tscls"])
        assert "\x1b[31merror:\x1b[0m" in capsys.readouterr().err

    def test_forced_off(self, capsys, monkeypatch):
        monkeypatch.setenv("TSCLS_COLOR", "0")
        main(["check", "/nonexistent/model.tscls"])
        err = capsys.readouterr().err
        assert "\x1b[" not in err and err.startswith("error:")


class TestTransitions:
    def test_initial_state_of_model(self, capsys):
        assert main(["transitions", LAC]) == 0
        lines = capsys.readouterr().out.splitlines()
        heads = [tuple(line.split("  ")[:3]) for line in lines]
        assert heads == [("R1", "/0", "0.02"), ("R3", "/0", "3.0"),
                         ("R7", "/0", "100.0")]

    def test_state_override(self, tiny, capsys):
        assert main(["transitions", tiny, "--state", "a | a | c"]) == 0
        assert capsys.readouterr().out == "change  /  2.0  a | b | c\n"

    def test_no_transitions(self, tiny, capsys):
        assert main(["transitions", tiny, "--state", "eps"]) == 0
        assert capsys.readouterr().out == ""

    def test_bad_state_term(self, tiny, capsys, monkeypatch):
        monkeypatch.setenv("TSCLS_COLOR", "0")
        assert main(["transitions", tiny, "--state", "a |"]) == 1
        assert "error:" in capsys.readouterr().err


class TestRun:
    def test_csv_to_file(self, tiny, tmp_path, capsys):
        out = tmp_path / "trace.csv"
        assert main(["run", tiny, "--out", str(out)]) == 0
        summary = capsys.readouterr().out
        assert summary.startswith("seed=7 steps=2 time=")
        assert summary.rstrip("\n").endswith(f"halt=exhausted out={out}")
        text = out.read_bytes().decode("utf-8")
        assert all(line.endswith("\r") for line in text.split("\n") if line)
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == ["time", "step", "rule", "path", "rate", "a", "b"]
        assert rows[1] == ["0.0", "0", "", "", "", "2", "0"]
        events = [r for r in rows[1:] if r[2]]
        assert [(r[2], r[3], r[4]) for r in events] \
            == [("change", "/", "2.0"), ("change", "/", "1.0")]
        assert [tuple(r[5:]) for r in events] == [("1", "1"), ("0", "2")]
        for row in rows[1:]:
            float(row[0])  # times round-trip through the shortest repr

    def test_csv_to_stdout(self, tiny, capsys):
        assert main(["run", tiny]) == 0
        got = capsys.readouterr()
        assert got.out.startswith("time,step,rule,path,rate,a,b\r\n")
        assert got.err.startswith("seed=7 steps=2 ")
        assert "halt=exhausted" in got.err

    def test_sample_grid(self, tiny, tmp_path):
        out = tmp_path / "trace.csv"
        main(["run", tiny, "--out", str(out)])
        rows = list(csv.reader(io.StringIO(
            out.read_bytes().decode("utf-8"))))
        samples = [r for r in rows[1:] if not r[2]]
        assert [r[0] for r in samples] == ["0.0", "250.0", "500.0", "750.0",
                                           "1000.0"]
        assert samples[-1][5:] == ["0", "2"]

    def test_json_stream(self, tiny, tmp_path):
        out = tmp_path / "trace.ndjson"
        assert main(["run", tiny, "--format", "json", "--out", str(out)]) == 0
        records = [json.loads(line)
                   for line in out.read_text().splitlines()]
        assert {r["kind"] for r in records} == {"event", "sample"}
        assert all(set(r) == {"kind", "time", "step", "rule", "path", "rate",
                              "observables"} for r in records)
        events = [r for r in records if r["kind"] == "event"]
        assert [e["rate"] for e in events] == [2.0, 1.0]
        assert all(r["rule"] is None for r in records
                   if r["kind"] == "sample")
        assert records[0] == {"kind": "sample", "time": 0.0, "step": 0,
                              "rule": None, "path": None, "rate": None,
                              "observables": {"a": 2, "b": 0}}

    def test_stream_ordered_by_time(self, tiny, tmp_path):
        out = tmp_path / "trace.ndjson"
        main(["run", tiny, "--format", "json", "--out", str(out)])
        records = [json.loads(line) for line in out.read_text().splitlines()]
        times = [r["time"] for r in records]
        assert times == sorted(times)

    def test_tmax_zero_single_sample(self, tiny, capsys):
        assert main(["run", tiny, "--tmax", "0", "--format", "json"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0])["kind"] == "sample"

    def test_deterministic_output(self, tiny, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["run", tiny, "--seed", "42", "--out", str(a)])
        main(["run", tiny, "--seed", "42", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_invalid_config(self, tiny, capsys, monkeypatch):
        monkeypatch.setenv("TSCLS_COLOR", "0")
        assert main(["run", tiny, "--samples", "0"]) == 1
        assert "samples" in capsys.readouterr().err

    def test_replicas(self, tiny, tmp_path, capsys):
        out = tmp_path / "rep.csv"
        assert main(["run", tiny, "--seed", "5", "--replicas", "3",
                     "--out", str(out)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 3
        for seed, line in zip((5, 6, 7), lines):
            path = tmp_path / f"rep.seed{seed}.csv"
            assert path.exists()
            assert line.startswith(f"seed={seed} ")
            assert line.endswith(f"out={path}")
        single = tmp_path / "single.csv"
        main(["run", tiny, "--seed", "6", "--out", str(single)])
        assert single.read_bytes() == (tmp_path / "rep.seed6.csv").read_bytes()

    def test_replicas_need_out(self, tiny, capsys, monkeypatch):
        monkeypatch.setenv("TSCLS_COLOR", "0")
        assert main(["run", tiny, "--replicas", "2"]) == 2
        assert "--out" in capsys.readouterr().err

    def test_replicas_positive(self, tiny, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("TSCLS_COLOR", "0")
        assert main(["run", tiny, "--replicas", "0",
                     "--out", str(tmp_path / "x.csv")]) == 2
