import csv
import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from qgauge.cli import parse_config, run
from qgauge.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
SCHEMA = json.loads(resources.files("qgauge").joinpath("data/report.schema.json").read_text())
FAST = ["--samples", "20", "--psh-samples", "10", "--hopf-interior", "10", "--hopf-mesh", "200"]


def test_eval_ball(capsys):
    assert run(["eval", "--domain", str(CONFIGS / "ball2.json"), "--point", "0.5,0,0,0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["h"] == pytest.approx(0.5, abs=1e-14)


def test_eval_egg_with_gradient(capsys):
    assert run(["eval", "--domain", str(CONFIGS / "egg12.json"), "--point", "1,0,1,0", "--grad"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["h"] == pytest.approx(1.189207115002721, abs=1e-13)
    assert out["gradient"] == pytest.approx([0.5946035575013605, 0.0, 0.2973017787506802, 0.0], abs=1e-12)


def test_verify_report_validates(tmp_path):
    out = tmp_path / "r.json"
    assert run(["verify", "--domain", str(CONFIGS / "egg12.json"), "--out", str(out), *FAST]) == 0
    report = json.loads(out.read_text())
    jsonschema.validate(report, SCHEMA)
    assert report["overall_pass"] is True
    assert [c["check_name"] for c in report["checks"]] == [
        "quasi_balanced", "pseudoconvex", "homogeneity", "transversality", "psh", "defining",
    ]
    assert report["hopf"]["c_hat"] > 0


@pytest.mark.parametrize("config", ["offcenter.json", "indefinite_egg.json", "polydisc2.json"])
def test_verify_negative_controls_exit_2(config, tmp_path):
    out = tmp_path / "r.json"
    assert run(["verify", "--domain", str(CONFIGS / config), "--out", str(out), *FAST]) == 2
    report = json.loads(out.read_text())
    jsonschema.validate(report, SCHEMA)
    assert report["overall_pass"] is False


def test_verify_subset_and_seed(capsys):
    args = ["verify", "--domain", str(CONFIGS / "ball2.json"), "--suite", "homogeneity", "--samples", "10", "--seed", "3"]
    assert run(args) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["seed"] == 3 and report["hopf"] is None and len(report["checks"]) == 1


def test_boundary_csv(tmp_path):
    out = tmp_path / "b.csv"
    assert run(["boundary", "--domain", str(CONFIGS / "egg12.json"), "--samples", "25", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["x1", "y1", "x2", "y2", "psi_residual"]
    assert len(rows) == 26
    assert max(abs(float(r[-1])) for r in rows[1:]) < 1e-10


def test_sweep_csv(tmp_path):
    out = tmp_path / "s.csv"
    args = ["sweep", "--domain", str(CONFIGS / "egg12.json"), "--direction", "0,0,4,0",
            "--t-min", "1", "--t-max", "3", "--steps", "3", "--out", str(out)]
    assert run(args) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t", "g", "dg_dt"]
    t, g, dg = map(float, rows[2])
    assert (t, g, dg) == pytest.approx((2.0, 0.0, -2.0), abs=1e-14)


def test_domains_list_and_show(capsys, tmp_path):
    assert run(["domains", "list"]) == 0
    listing = capsys.readouterr().out
    assert "egg12" in listing and "indefinite_egg" in listing
    assert run(["domains", "show", "product_egg"]) == 0
    cfg = json.loads(capsys.readouterr().out)
    parse_config(cfg)
    assert cfg["builtin"]["family"] == "product_egg"


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--domain", "/nonexistent.json", "--point", "1,0"],
        ["eval", "--domain", str(CONFIGS / "ball2.json"), "--point", "1,0"],
        ["eval", "--domain", str(CONFIGS / "ball2.json"), "--point", "a,b,c,d"],
        ["verify", "--domain", str(CONFIGS / "ball2.json"), "--suite", "bogus"],
        ["domains", "show", "nope"],
        ["frobnicate"],
        [],
    ],
)
def test_errors_exit_1(argv, capsys):
    assert run(argv) == 1
    assert capsys.readouterr().err.strip()


@pytest.mark.parametrize(
    "raw, field",
    [
        ({"dimension": 2, "weights": [2, 4], "defining_function": "abs2(z1) - 1", "bounding_radius": 2}, "weights"),
        ({"dimension": 2, "weights": [1, 2], "defining_function": "z1 - 1", "bounding_radius": 2}, "defining_function"),
        ({"dimension": 2, "weights": [1, 2], "defining_function": "abs2(z1)", "builtin": {"family": "unit_ball"},
          "bounding_radius": 2}, "defining_function"),
        ({"builtin": {"family": "unit_ball"}, "colour": "red"}, "colour"),
        ({"builtin": {"family": "unit_ball"}, "solver": {"tol": 1e-6}}, "solver.tol"),
        ({"builtin": {"family": "unit_ball"}, "thresholds": {"psh": -1}}, "thresholds.psh"),
        ({"builtin": {"family": "unit_ball", "params": {"n": 3}}, "dimension": 2}, "dimension"),
        ({"builtin": {"family": "torus"}}, "builtin.family"),
        ({"dimension": 2, "weights": [1, 1], "defining_function": "abs2(z1) + abs2(z2) + 1",
          "bounding_radius": 2}, "defining_function"),
    ],
)
def test_config_errors_name_the_field(raw, field):
    with pytest.raises(ConfigError) as e:
        parse_config(raw)
    assert e.value.field == field


def test_weights_error_mentions_coprimality():
    with pytest.raises(ConfigError, match="NotCoprime"):
        parse_config({"dimension": 2, "weights": [2, 4], "defining_function": "abs2(z1) - 1", "bounding_radius": 2})


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qgauge", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("qgauge ")
