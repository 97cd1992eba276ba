from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from tm_antipowers.cli import csv_cell, flatten, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def records(*argv):
    code, out, err = call(*argv)
    assert code == 0, err
    return [json.loads(line) for line in out.splitlines()]


def test_antipower_example():
    (rec,) = records("antipower", "--j", "2", "--k", "3", "--m", "4", "--format", "json")
    assert rec["result"] is True
    assert rec["schema_version"] == "1"
    assert rec["command"] == "antipower"
    assert rec["inputs"] == {"j": 2, "k": 3, "m": 4}
    assert isinstance(rec["elapsed_ms"], int)


def test_gamma_example():
    (rec,) = records("gamma", "--j", "0", "--k", "3")
    assert rec["result"] == 5


def test_simple_commands():
    assert records("letter", "--i", "2")[0]["result"] == 1
    assert records("segment", "--alpha", "1", "--beta", "16")[0]["result"] == "0110100110010110"
    assert records("big-gamma", "--k", "1")[0]["result"] is None
    assert records("big-gamma", "--j", "1", "--k", "22")[0]["result"] == 45
    assert records("frak-k", "--m", "13")[0]["result"] == 27


def test_bound_commands():
    recs = records("bounds-verify", "--j", "0", "--m-min", "2", "--m-max", "20")
    assert len(recs) == 19 * 8
    assert all(r["result"]["holds"] for r in recs)
    (even,) = records("bounds-verify", "--m", "6", "--lemma", "EVEN")
    assert even["result"]["bound"] == "56/3" and even["result"]["status"] == "pass"
    assert len(records("gen47", "--ell", "5")) == 2
    assert all(r["result"]["holds"] for r in records("gencor", "--j", "2", "--k", "22"))
    assert records("yvy", "--m", "7")[0]["result"]["count"] == 0


def test_construct_command():
    (rec,) = records("construct", "--r", "9", "--m", "185", "--ell", "8", "--h", "1", "--p", "3", "--q", "26")
    assert rec["result"]["ok"] is True
    (rec,) = records("construct", "--family", "K_beta", "--param", "9")
    assert rec["result"]["ok"] is True
    (rec,) = records("construct", "--r", "9", "--m", "185", "--ell", "8", "--h", "64", "--p", "3", "--q", "26")
    assert rec["result"]["first_failing"] == 1


def test_family_command():
    recs = records("family", "--family", "k_alpha", "--param-min", "2", "--param-max", "4")
    assert [r["inputs"]["param"] for r in recs] == [2, 3, 4]
    assert all(r["result"]["observed_ok"] for r in recs)


def test_conjecture_scan_csv():
    code, out, _ = call("conjecture-scan", "--j", "1", "--k-min", "3", "--k-max", "8",
                        "--m-max", "200", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6
    assert sum(int(r["result.count"]) for r in rows) / len(rows) < 0.5


@pytest.mark.parametrize("argv", [
    ("ratio-sweep", "--j", "2", "--k-min", "1", "--k-max", "12"),
    ("conjecture-scan", "--j", "2", "--k-min", "3", "--k-max", "5", "--m-max", "20"),
    ("bounds-verify", "--j", "1", "--m-min", "2", "--m-max", "10"),
    ("construct", "--family", "k_alpha", "--param", "3"),
    ("yvy", "--m", "5", "--prefix-len", "200"),
    ("big-gamma", "--k", "2"),
])
def test_csv_and_json_agree(argv):
    argv = argv + ("--no-timing",)
    js = records(*argv, "--format", "json")
    code, out, _ = call(*argv, "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == len(js)
    for rec, row in zip(js, rows):
        flat = flatten(rec)
        assert set(flat) == set(row)
        for key, value in flat.items():
            assert row[key] == csv_cell(value), key


def test_output_is_byte_identical_across_runs_and_threads():
    argv = ("ratio-sweep", "--j", "1", "--k-min", "1", "--k-max", "40", "--no-timing", "--format", "csv")
    first = call(*argv, "--threads", "1")[1]
    assert call(*argv, "--threads", "1")[1] == first
    assert call(*argv, "--threads", "3")[1] == first


def test_exit_codes():
    assert call("letter", "--i", "0")[0] == 1
    assert call("family", "--family", "k_alpha", "--j", "4", "--param-min", "1", "--param-max", "1")[0] == 1
    assert call("antipower", "--j", "0", "--k", "300", "--m", "300", "--mem-cap", "64")[0] == 2
    assert call("frak-k", "--m", "13", "--cap", "10")[0] == 3
    code, out, err = call("no-such-command")
    assert code == 1 and out == "" and "usage" in err
    assert call("gamma", "--k", "three")[0] == 1
    assert call("gamma")[0] == 1
    assert call("gamma", "--k", "3", "--threads", "0")[0] == 1
    assert call("--help")[0] == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "tm_antipowers", "antipower", "--j", "2", "--k", "3", "--m", "2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"] is False
