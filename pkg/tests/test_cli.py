import csv
import io
import json
from contextlib import redirect_stdout

import pytest

from corput_lab.cli import main


def run_cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


def test_verify_pass_and_report(tmp_path):
    out = tmp_path / "report"
    code, text = run_cli(
        ["verify", "--config", '{"suite": "krug"}', "--out", str(out)]
    )
    assert code == 0
    assert "pass" in text
    payload = json.loads((out / "report.json").read_text())
    assert payload["suite"] == "krug"
    assert (out / "cases.csv").read_text().startswith("case,")


def test_verify_config_error():
    code, _ = run_cli(["verify", "--config", '{"suite": "bogus"}'])
    assert code == 2
    code, _ = run_cli(["verify", "--config", '{"suite": "krug", "nope": 1}'])
    assert code == 2


def test_verify_fail_exit_code():
    code, text = run_cli(
        ["verify", "--config", '{"suite": "tv_k", "params": {"grid": 20001}}']
    )
    assert code == 1


def test_verify_config_from_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"suite": "mixture", "params": {"cases": 4}}))
    code, text = run_cli(["verify", "--config", f"@{cfg}"])
    assert code == 0


def test_oscint_csv_output():
    code, text = run_cli(
        [
            "oscint",
            "--f",
            "t^2",
            "--measure",
            "piecewise [0,1] [1]",
            "--t-min",
            "10",
            "--t-max",
            "100",
            "--points",
            "8",
        ]
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["t", "re", "im", "abs", "err"]
    assert len(rows) == 9
    assert float(rows[1][0]) == pytest.approx(10.0)


def test_pushforward_exact_and_json(tmp_path):
    json_out = tmp_path / "cdf.json"
    code, text = run_cli(
        [
            "pushforward",
            "--f",
            "t^2",
            "--measure",
            "piecewise [0,1] [1]",
            "--bins",
            "16",
            "--json-out",
            str(json_out),
        ]
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["s", "density", "stderr"]
    payload = json.loads(json_out.read_text())
    assert payload["method"] == "exact1d"
    assert payload["cdf"][0][1] == pytest.approx(0.0)
    assert payload["cdf"][-1][1] == pytest.approx(1.0)


def test_pushforward_mc():
    code, text = run_cli(
        [
            "pushforward",
            "--f",
            "x1 + x2",
            "--measure",
            '{"type": "cube", "n": 2}',
            "--bins",
            "8",
            "--mc-count",
            "20000",
        ]
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert len(rows) == 9


def test_modulus_output():
    code, text = run_cli(
        ["modulus", "--density", "piecewise [0,0.5,1] [1.5; 0.5]", "--eps", "0.1"]
    )
    assert code == 0
    lines = dict(
        line.split(" = ") for line in text.strip().splitlines() if " = " in line
    )
    assert float(lines["omega(0.1)"]) == pytest.approx(0.3)
    assert float(lines["bv_seminorm"]) == pytest.approx(3.0)


def test_sublevel_csv():
    code, text = run_cli(
        [
            "sublevel",
            "--f",
            "0.5*t^2",
            "--measure",
            "piecewise [0,1] [1]",
            "--eps",
            "0.01,0.1",
        ]
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["eps", "measure", "bound", "pass"]
    assert float(rows[1][1]) == pytest.approx((2 * 0.01) ** 0.5)
    assert rows[1][3] == "True"
