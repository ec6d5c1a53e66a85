import csv
import json

import pytest

from dllab import cli


def run_cli(argv):
    return cli.main(argv)


def test_verify_writes_schema_report(tmp_path, capsys):
    out = tmp_path / "trace.json"
    rc = run_cli(["verify", "--suite", "trace", "--out", str(out)])
    assert rc == 0
    assert capsys.readouterr().out.strip() == str(out)
    rep = json.loads(out.read_text())
    assert rep["schema"] == 1
    assert rep["suite"] == "trace"
    for c in rep["claims"]:
        assert set(c) >= {"claim", "status"}
        assert c["status"] == "pass"


def test_verify_stdout_report(capsys):
    rc = run_cli(["verify", "--suite", "orbit", "--q", "2"])
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["schema"] == 1
    assert all(c["status"] == "pass" for c in rep["claims"])


def test_unknown_suite_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run_cli(["verify", "--suite", "frobnicate"])
    assert exc.value.code == 2


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run_cli([])
    assert exc.value.code == 2


def test_failing_claim_gives_exit_one(tmp_path, monkeypatch, capsys):
    def broken(args):
        return {
            "suite": "broken",
            "params": {},
            "claims": [cli._claim("always wrong", False)],
        }

    monkeypatch.setitem(cli.SUITES, "trace", broken)
    rc = run_cli(["verify", "--suite", "trace", "--out", str(tmp_path / "r.json")])
    assert rc == 1
    assert "always wrong" in capsys.readouterr().err


def test_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli(["verify", "--suite", "thm31", "--n", "2", "--q", "2",
                    "--out", str(a)]) == 0
    assert run_cli(["verify", "--suite", "thm31", "--n", "2", "--q", "2",
                    "--jobs", "4", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_series_report_stable_across_runs(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli(["verify", "--suite", "series", "--out", str(a)]) == 0
    assert run_cli(["verify", "--suite", "series", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_dump_points_level3(tmp_path):
    out = tmp_path / "pts.csv"
    rc = run_cli(["dump", "--kind", "points", "--n", "2", "--q", "2",
                  "--h", "3", "--s", "1", "--out", str(out)])
    assert rc == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["a1", "a2", "a3", "a4"]
    # every representative over the degree-n field is a rational point
    assert len(rows) == 1 + 4**4
    assert rows == sorted(rows, key=lambda r: (r != rows[0], r))


def test_dump_points_level2_counts(tmp_path):
    out = tmp_path / "pts.csv"
    rc = run_cli(["dump", "--kind", "points", "--n", "2", "--q", "2",
                  "--h", "2", "--s", "1", "--out", str(out)])
    assert rc == 0
    rows = list(csv.reader(out.open()))
    assert len(rows) == 1 + 16


def test_dump_char_table(tmp_path):
    out = tmp_path / "ct.csv"
    rc = run_cli(["dump", "--kind", "char-table", "--n", "2", "--q", "2",
                  "--out", str(out)])
    assert rc == 0
    rows = list(csv.reader(out.open()))
    assert rows[0][:3] == ["psi", "conductor_exp", "degree"]
    assert len(rows) == 1 + 4
    degrees = sorted(int(r[2]) for r in rows[1:])
    assert degrees == [1, 1, 2, 2]


def test_dump_y_set_sorted(tmp_path):
    out = tmp_path / "ys.csv"
    rc = run_cli(["dump", "--kind", "y-set", "--n", "2", "--q", "2",
                  "--h", "3", "--s", "2", "--out", str(out)])
    assert rc == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["y0", "y1", "y2", "y3", "y4"]
    body = rows[1:]
    assert body == sorted(body, key=lambda r: tuple(int(v) for v in r))


def test_dump_size_limit(tmp_path, capsys):
    rc = run_cli(["dump", "--kind", "points", "--n", "2", "--q", "3",
                  "--h", "3", "--s", "2", "--max-size", "1000",
                  "--out", str(tmp_path / "big.csv")])
    assert rc == 1
    assert "SizeLimitExceeded" in capsys.readouterr().err
