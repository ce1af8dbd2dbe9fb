import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from matrixap.cli import main
from matrixap.grids import GridSpec, build_grid
from matrixap.report import (ConfigError, dumps, emit_plot_data, read_plot_data, reproduce_example, run,
                             strip_timing, validate_config, validate_report)
from matrixap.weights import TabulatedWeight, catalog_weight, write_tabulated

GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "example_report.json")


@pytest.fixture(scope="module")
def example_report():
    return reproduce_example()


def _close(a, b, path="$"):
    if isinstance(a, dict):
        assert set(a) == set(b), path
        for k in a:
            _close(a[k], b[k], f"{path}.{k}")
    elif isinstance(a, list):
        assert len(a) == len(b), path
        for i, (u, v) in enumerate(zip(a, b)):
            _close(u, v, f"{path}[{i}]")
    elif isinstance(a, float) and isinstance(b, (int, float)):
        assert a == pytest.approx(b, rel=1e-8, abs=1e-12) or (math.isnan(a) and math.isnan(b)), path
    else:
        assert a == b, path


def test_example_matches_golden(example_report):
    golden = json.load(open(GOLDEN))
    current = json.loads(dumps(strip_timing(example_report)))
    current["version"] = golden["version"]
    _close(current, golden)


def test_example_blocks(example_report):
    validate_report(example_report)
    assert example_report["exit_code"] == 0
    blocks = {b["id"]: b for b in example_report["blocks"]}
    assert blocks["example.det"]["result"]["max_abs_deviation"] <= 1e-10
    pair = next(p for p in blocks["example.product"]["result"]["pairs"] if (p["a"], p["b"]) == (0.25, 1.0))
    assert pair["closed_form_scalar"] == pytest.approx(4 / 3 * 0.4375)
    assert np.allclose(np.array(pair["numeric"])[..., 0], 4 / 3 * 0.4375 * np.eye(2), rtol=1e-9)
    fro = blocks["example.frobenius"]["result"]
    assert fro["max"] <= 2 * math.sqrt(2) / math.sqrt(3) + 1e-6
    assert fro["limit_0_1"] == pytest.approx(math.sqrt(8 / 3), abs=1e-5)
    assert blocks["example.sufficient"]["result"]["verdict"] == "indeterminate"
    assert blocks["example.non_necessity"]["result"]["demonstrates_non_necessity"]


def test_report_is_deterministic():
    cfg = {"weight": {"catalog": "rotated_power"}, "analyses": ["ap", "roudenko"], "sphere_count": 64, "seed": 7,
           "family": {"type": "lattice", "center_counts": 2, "r_min": 0.05, "r_max": 0.2, "n_radii": 2},
           "grid": {"counts": 8, "grading": 0.8, "depths": [1e-3, 1e-5, 1e-7]}}
    a, b = run(cfg), run(cfg)
    assert dumps(strip_timing(a)) == dumps(strip_timing(b))
    assert a["blocks"][0]["wall_time_s"] >= 0


def test_plot_data_divergence_trace(tmp_path, example_report):
    path = emit_plot_data(example_report, "example.divergence", tmp_path / "div.dat")
    data = read_plot_data(path)
    assert len(data) > 10
    assert np.allclose(data[:, 1], 1 + 1 / data[:, 0], rtol=1e-9)


def test_plot_data_empty_trace(tmp_path, example_report):
    path = emit_plot_data(example_report, "example.product", tmp_path / "empty.dat")
    assert path.read_text() == "# x value resolution\n"
    assert read_plot_data(path).shape == (0, 3)
    with pytest.raises(KeyError):
        emit_plot_data(example_report, "missing", tmp_path / "x.dat")


def test_plot_data_identity_roudenko(tmp_path):
    rep = run({"analyses": ["roudenko"]})
    data = read_plot_data(emit_plot_data(rep, "roudenko", tmp_path / "r.dat"))
    assert np.allclose(data[:, 1], 1.0, atol=1e-9)


def test_unknown_weight_is_config_error(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"weight": {"catalog": "nope"}}))
    assert main(["analyze", "--config", str(cfg), "--out", str(tmp_path / "r.json")]) == 2
    assert "weight.catalog" in capsys.readouterr().err
    with pytest.raises(ConfigError):
        validate_config({"bogus": 1})
    with pytest.raises(ConfigError):
        validate_config({"p": 1.0})


def test_bad_params_is_config_error(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"weight": {"catalog": "identity", "params": {"bogus": 1}}}))
    assert main(["analyze", "--config", str(cfg), "--out", str(tmp_path / "r.json")]) == 2


def test_expect_bounded_divergence_exit_code():
    rep = run({"weight": {"catalog": "diag_power", "params": {"alpha": [3.0, 0.0]}}, "analyses": ["ap"],
               "sphere_count": 16, "expect_bounded": True,
               "family": {"type": "anchored", "r_min": 0.01, "r_max": 0.5, "n_radii": 2}})
    assert rep["blocks"][0]["verdict"] == "divergence_suspected"
    assert rep["exit_code"] == 1


def test_module_error_captured_in_block():
    rep = run({"weight": {"catalog": "paper_example"}, "analyses": ["slices", "roudenko"],
               "family": {"type": "anchored", "r_min": 0.01, "r_max": 0.5, "n_radii": 2}})
    validate_report(rep)
    first, second = rep["blocks"]
    assert first["status"] == "error" and first["error"]["code"] == "invalid_input"
    assert second["status"] == "ok"
    assert rep["exit_code"] == 3


def test_tabulated_weight_config(tmp_path):
    W = catalog_weight("rotated_power")
    path = tmp_path / "w.txt"
    write_tabulated(path, TabulatedWeight.from_grid(W, build_grid(W.domain, GridSpec((64,)))))
    rep = run({"weight": {"file": str(path)}, "analyses": ["roudenko"],
               "family": {"type": "lattice", "center_counts": 2, "r_min": 0.1, "r_max": 0.2, "n_radii": 2},
               "grid": {"counts": 8, "grading": 0.8, "depths": [1e-2, 1e-3, 1e-4]}})
    assert rep["blocks"][0]["status"] == "ok"


def test_cli_subprocess_and_env(tmp_path):
    env = dict(os.environ, MATRIXAP_OUT_DIR=str(tmp_path))
    res = subprocess.run([sys.executable, "-m", "matrixap", "roudenko", "--weight", "identity",
                          "--resolution-ladder", "1e-2,1e-3,1e-4", "--plot", f"roudenko:{tmp_path / 'r.dat'}"],
                         env=env, capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    rep = json.loads((tmp_path / "roudenko.json").read_text())
    assert rep["config"]["grid"]["depths"] == [1e-2, 1e-3, 1e-4]
    assert (tmp_path / "r.dat").exists()


def test_list_catalog(capsys):
    assert main(["list-catalog"]) == 0
    names = [c["name"] for c in json.loads(capsys.readouterr().out)]
    assert "paper_example" in names


def test_shortcut_params(tmp_path):
    out = tmp_path / "s.json"
    assert main(["sufficient", "--weight", "diag_power", "--param", "alpha=[0.5,-0.5]", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["blocks"][0]["result"]["verdict"] == "sufficient_conditions_hold"
