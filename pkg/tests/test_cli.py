import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from apavoid import reals
from apavoid.cli import Config, run
from apavoid.escape import EscapeCertificate


@pytest.fixture(autouse=True)
def _isolated(monkeypatch):
    monkeypatch.delenv("APAVOID_CONFIG", raising=False)
    monkeypatch.setattr(reals, "DEFAULT_MAX_WIDTH", reals.DEFAULT_MAX_WIDTH)


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def call_json(*argv):
    code, text = call(*argv)
    return code, json.loads(text)


def test_escape_example():
    code, data = call_json("escape", "--spec", "basic:3", "--x0", "1/2", "--delta", "1")
    assert code == 0
    assert data["schema"] == "1"
    assert data["n"] == 1 and data["x_n"] == "3/2"
    assert data["method"] == "ConstructiveRational"
    cert = EscapeCertificate.from_json(data)
    assert cert.x_n == F(3, 2) and cert.forbidden.to_json() == [["4/3", "5/3"]]


def test_escape_irrational_and_product():
    code, data = call_json("escape", "--x0", "1/2", "--delta", "sqrt(2)")
    assert code == 0 and data["n"] == 6 and data["x_n"] == "1/2+6*sqrt(2)"
    code, data = call_json(
        "escape", "--spec", "basic:3^2", "--x0", "1/2,1/2", "--delta", "sqrt(2),0"
    )
    assert code == 0 and data["n"] == 6 and data["coordinate"] == 0
    code, data = call_json("escape", "--x0", "1/2", "--delta", "sqrt(2)", "--depth", "3")
    assert code == 0 and data["result"] == "NoWitnessWithinDepth"


def test_window_example():
    code, data = call_json("window", "--N", "3", "--from", "0", "--to", "1")
    assert code == 0
    assert data["measure"] == "2/3"
    assert data["intervals"] == [["1/3", "1"]]


def test_window_csv_and_scaled_spec():
    code, text = call("window", "--N", "3", "--from", "0", "--to", "2", "--format", "csv")
    assert code == 0
    assert list(csv.reader(io.StringIO(text))) == [
        ["lo", "hi"], ["1/3", "4/3"], ["5/3", "2"]
    ]
    code, data = call_json("window", "--spec", "scaled:3:sqrt(2)", "--from", "0", "--to", "2")
    assert data["intervals"] == [["1/3*sqrt(2)", "4/3"], ["5/3", "4/3*sqrt(2)"]]


def test_choose_N_example():
    assert call_json("choose-N", "--lambda", "9/10")[1]["N"] == 20


def test_check_command():
    assert call_json("check", "--x", "1/2")[1]["member"] is True
    assert call_json("check", "--x", "3/2")[1]["member"] is False
    assert call_json("check", "--spec", "basic:3^2", "--x", "1/2,1/2")[1]["member"] is True


def test_claim1_command():
    code, data = call_json("claim1", "--N", "3", "--x0", "8", "--delta", "1", "--k", "4")
    assert code == 0 and data["fraction"] == "9/11" and data["lower_bound_holds"]
    code, data = call_json("claim1", "--N", "3", "--x0", "0", "--delta", "1", "--k", "4")
    assert code == 1
    assert data["error"] == "PreconditionUnmet"
    assert data["report"]["fraction"] == "63/85"


def test_equidist_defaults_to_csv():
    code, text = call("equidist", "--N", "3", "--x0", "1/2", "--delta", "1", "--M", "9", "--eps", "1/10")
    assert code == 0
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["cell", "count", "frequency", "deviation"]
    assert [r[1] for r in rows[1:]] == ["0", "10", "0"]
    code, data = call_json(
        "--format", "json", "equidist", "--x0", "0", "--delta", "sqrt(2)", "--M", "100", "--eps", "1/10"
    )
    assert sum(data["counts"]) == 101


def test_find_ap_command():
    code, data = call_json("find-ap", "--G", '[["0","1/2"]]', "--xi", "1", "--verify-range", "10000")
    assert code == 0
    assert data["x"] == "5/4" and data["verified"] is True
    assert data["residual_set"] == [["1/2", "2"]]


@pytest.mark.parametrize(
    "argv",
    [
        ["window", "--N", "3", "--from", "0.5", "--to", "1"],
        ["escape", "--x0", "1/2"],
        ["choose-N", "--lambda", "1"],
        ["escape", "--x0", "1/2", "--delta", "1", "--depth", "0", "--method", "search"],
        ["find-ap", "--G", "not json", "--xi", "1"],
        ["nonsense"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as info:
        call(*argv)
    assert info.value.code == 2


@pytest.mark.parametrize(
    "argv, error",
    [
        (["escape", "--x0", "3/2", "--delta", "1"], "NotInSet"),
        (["escape", "--x0", "1/2", "--delta", "0"], "ZeroGap"),
        (["find-ap", "--G", '[["0","1"]]', "--xi", "1"], "MeasureTooLarge"),
        (["window", "--spec", "basic:3^2", "--from", "0", "--to", "1"], "UnsupportedSpec"),
    ],
)
def test_domain_errors_exit_1(argv, error):
    code, data = call_json(*argv)
    assert code == 1 and data["error"] == error


def test_N1_warns():
    with pytest.warns(UserWarning):
        code, data = call_json("window", "--N", "1", "--from", "0", "--to", "2")
    assert data["measure"] == "0"


def test_config_file(tmp_path, monkeypatch):
    path = tmp_path / "apavoid.conf"
    path.write_text("# defaults\ndefault_N = 5\nsearch_depth=3\noutput_format=csv\n")
    monkeypatch.setenv("APAVOID_CONFIG", str(path))
    code, text = call("window", "--from", "0", "--to", "1")
    assert text.splitlines() == ["lo,hi", "1/5,1"]
    # flags override the file
    code, data = call_json("window", "--N", "3", "--from", "0", "--to", "1", "--format", "json")
    assert data["measure"] == "2/3"
    code, data = call_json("--format", "json", "escape", "--x0", "1/2", "--delta", "sqrt(2)")
    # S(5) from the file: 1/2 + 2*sqrt(2) has fractional part in Q_1, cell 3 has residue 1
    assert data["spec"] == {"type": "basic", "N": 5} and data["n"] == 2
    # depth 3 from the file stops the S(3) search, whose escape is at n = 6
    code, data = call_json("escape", "--spec", "basic:3", "--x0", "1/2", "--delta", "sqrt(2)")
    assert (data["result"], data["depth"]) == ("NoWitnessWithinDepth", 3)


def test_config_validation():
    assert Config.from_text("default_N=4\n").default_N == 4
    assert Config.from_text("max_refine_width = 1/1024").max_refine_width == F(1, 1024)
    for bad in ["default_N=0", "colour=blue", "output_format=xml", "just words"]:
        with pytest.raises(ValueError):
            Config.from_text(bad)


def test_bad_config_file_exits_2(tmp_path, monkeypatch):
    path = tmp_path / "bad.conf"
    path.write_text("search_depth = -4\n")
    monkeypatch.setenv("APAVOID_CONFIG", str(path))
    with pytest.raises(SystemExit) as info:
        call("choose-N", "--lambda", "0")
    assert info.value.code == 2


def test_plot_window_writes_figure(tmp_path):
    fig = tmp_path / "window.png"
    code, data = call_json("plot-window", "--N", "3", "--from", "0", "--to", "3", "--figure", str(fig))
    assert code == 0
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    kept = [s for s in data["segments"] if s["member"]]
    assert sum(F(s["hi"]) - F(s["lo"]) for s in kept) == 2


def test_equidist_figure(tmp_path):
    fig = tmp_path / "eq.svg"
    code, _ = call("equidist", "--x0", "0", "--delta", "sqrt(2)", "--M", "500", "--eps", "1/10",
                   "--figure", str(fig))
    assert code == 0 and fig.read_text().lstrip().startswith("<?xml")


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "apavoid", "choose-N", "--lambda", "1/2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"schema": "1", "lambda": "1/2", "N": 4}
