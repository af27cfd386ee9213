import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qrenewal import __version__
from qrenewal.cli import main, zero_crossings
from qrenewal.config import config_hash, parse_config, set_path, variants
from qrenewal.errors import ParameterError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

PURE = {
    "channel": {"kind": "x"},
    "wtds": {"modified": [{"kind": "exp", "mu": 3.0}], "stationary": {"kind": "exp", "mu": 1.0}},
    "pair": [0, 1, 0], "T": 2.0, "dt_out": 0.01, "N": 3000, "seed": 5,
}
DRESSED = {
    "channel": {"kind": "x-ad", "gamma": 0.3},
    "generator": {"lambdas": [0.9, 0.9, 0.9]},
    "wtds": {"modified": [{"kind": "exp", "mu": 13.0}], "stationary": {"kind": "exp", "mu": 3.0}},
    "pair": [0, 1, 0], "T": 2.0, "dt_out": 0.02, "N": 2500, "seed": 4,
}


def write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def run(tmp_path, command, cfg, out="out", *extra):
    return main([command, "--config", write(tmp_path, cfg), "--out-dir", str(tmp_path / out), *extra])


def read_csv(path):
    lines = Path(path).read_text().splitlines()
    header = [l for l in lines if l.startswith("#")]
    cols = lines[len(header)].split(",")
    data = np.array([[float(v) for v in l.split(",")] for l in lines[len(header) + 1:]])
    return header, cols, data


def test_all_recipes_parse():
    files = sorted(CONFIGS.glob("*.json"))
    assert files
    for f in files:
        raw = json.loads(f.read_text())
        for _, v in variants({k: val for k, val in raw.items() if k != "sweep"}):
            parse_config(v)


def test_simulate_outputs_and_metadata(tmp_path):
    assert run(tmp_path, "simulate", DRESSED) == 0
    header, cols, data = read_csv(tmp_path / "out" / "curve.csv")
    assert cols == ["t", "D", "stderr"]
    assert header == [f"# tool=qrenewal version={__version__} config_hash={config_hash(DRESSED)} seed=4"]
    assert data[0, 1] == 1.0 and data.shape == (101, 3)
    rep = json.loads((tmp_path / "out" / "report.json").read_text())
    assert rep["metadata"] == {"tool": "qrenewal", "version": __version__, "config_hash": config_hash(DRESSED), "seed": 4}
    res = rep["results"][0]
    assert res["revival_count"] == len(res["revivals"]) and res["measure"] >= 0


def test_simulate_is_byte_identical_across_runs_and_workers(tmp_path):
    cfg = dict(DRESSED, N=3500, dump_trajectories=2)
    assert run(tmp_path, "simulate", cfg, "a", "--workers", "1") == 0
    assert run(tmp_path, "simulate", cfg, "b", "--workers", "2") == 0
    assert run(tmp_path, "simulate", cfg, "c", "--workers", "1") == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert "trajectory_0.csv" in names and "trajectory_1.csv" in names
    for other in ("b", "c"):
        assert names == sorted(p.name for p in (tmp_path / other).iterdir())
        for n in names:
            assert (tmp_path / "a" / n).read_bytes() == (tmp_path / other / n).read_bytes()


def test_seed_flag_overrides_config(tmp_path):
    assert run(tmp_path, "simulate", DRESSED, "a", "--seed", "11") == 0
    rep = json.loads((tmp_path / "a" / "report.json").read_text())
    assert rep["metadata"]["seed"] == 11


def test_markov_recipe_measure_zero(tmp_path):
    cfg = json.loads((CONFIGS / "markov.json").read_text())
    assert run(tmp_path, "simulate", cfg, "out", "-N", "10000") == 0
    res = json.loads((tmp_path / "out" / "report.json").read_text())["results"][0]
    assert res["measure"] == 0.0 and res["revival_count"] == 0


def test_variants_write_one_curve_each(tmp_path):
    cfg = dict(DRESSED, variants=[{"label": "g0", "set": {"channel.gamma": 0.0}},
                                  {"label": "g06", "set": {"channel.gamma": 0.6}}])
    assert run(tmp_path, "simulate", cfg) == 0
    out = tmp_path / "out"
    assert (out / "curve_g0.csv").exists() and (out / "curve_g06.csv").exists()
    rep = json.loads((out / "report.json").read_text())
    assert [r["label"] for r in rep["results"]] == ["g0", "g06"]


def test_degenerate_sweep_matches_simulate(tmp_path):
    cfg = dict(DRESSED, method="mc", sweep={"axes": [{"param": "channel.gamma", "values": [0.3]},
                                                     {"param": "generator.lambdas.1", "values": [0.9]}]})
    assert run(tmp_path, "sweep", cfg, "sw") == 0
    assert run(tmp_path, "simulate", DRESSED, "sim") == 0
    _, cols, data = read_csv(tmp_path / "sw" / "heatmap.csv")
    assert cols == ["param1", "param2", "revival_count", "measure"]
    res = json.loads((tmp_path / "sim" / "report.json").read_text())["results"][0]
    assert data.shape == (1, 4)
    assert data[0, 2] == res["revival_count"] and data[0, 3] == res["measure"]


def test_sweep_revival_counts_bounded(tmp_path):
    cfg = dict(PURE, wtds={"modified": [{"kind": "exp", "mu": 10.0}, {"kind": "exp", "mu": 10.0}],
                           "stationary": {"kind": "exp", "mu": 1.0}},
               sweep={"axes": [{"param": "wtds.modified.0.mu", "values": [0.5, 5, 20, 40]},
                               {"param": "wtds.modified.1.mu", "values": [0.5, 5, 20, 40]}]})
    assert run(tmp_path, "sweep", cfg) == 0
    _, _, data = read_csv(tmp_path / "out" / "heatmap.csv")
    assert data.shape == (16, 4)
    assert set(data[:, 2]) <= {0, 1, 2}
    assert data[(data[:, 0] == 20) & (data[:, 1] == 5), 2] == 2


def test_time_axis_sweep(tmp_path):
    cfg = json.loads((CONFIGS / "fig8_erlang_q.json").read_text())
    assert run(tmp_path, "sweep", cfg) == 0
    _, cols, data = read_csv(tmp_path / "out" / "heatmap.csv")
    assert cols[-1] == "q"
    small = data[data[:, 0] == 0.5]
    assert np.all(small[:, 4] > 0)
    assert np.any(data[data[:, 0] == 5.0][:, 4] < 0)


def test_analytic_erlang_zero_crossings(tmp_path):
    cfg = json.loads((CONFIGS / "erlang_unmodified.json").read_text())
    assert run(tmp_path, "analytic", cfg, "out", "-N", "2000") == 0
    rep = json.loads((tmp_path / "out" / "analytic_report.json").read_text())
    zeros = 3 * np.pi / 4 + np.pi * np.arange(3)
    assert np.allclose(rep["zero_crossings"], zeros, atol=1e-4)
    assert "comparison" in rep
    _, cols, data = read_csv(tmp_path / "out" / "parity.csv")
    assert cols == ["t", "p_even", "p_odd", "q"]
    assert np.allclose(data[:, 1] + data[:, 2], 1)


def test_analytic_residual_report(tmp_path):
    assert run(tmp_path, "analytic", PURE) == 0
    cmp_ = json.loads((tmp_path / "out" / "analytic_report.json").read_text())["comparison"]
    assert cmp_["N"] == 3000 and cmp_["max_residual"] < 0.1


def test_optimize_writes_landscape(tmp_path):
    cfg = dict(DRESSED, pair="optimize", N=2000)
    assert run(tmp_path, "optimize", cfg) == 0
    rep = json.loads((tmp_path / "out" / "report.json").read_text())
    _, cols, data = read_csv(tmp_path / "out" / "landscape.csv")
    assert cols == ["x", "y", "z", "measure", "measure_stderr"]
    assert data.shape[0] == len(rep["optimizer_trace"]) >= 81
    assert rep["measure"] >= data[:81, 3].max()


@pytest.mark.parametrize("cfg", [
    dict(PURE, wtds={"stationary": {"kind": "weibull", "mu": 1.0}}),
    dict(PURE, channel={"kind": "ad", "gamma": 2.0}),
    dict(PURE, N=0),
    dict(PURE, unknown_key=1),
    dict(PURE, dt_out=0.3),
])
def test_validation_errors_exit_2(tmp_path, cfg, capsys):
    assert run(tmp_path, "simulate", cfg) == 2
    assert "invalid configuration" in capsys.readouterr().err


def test_bad_json_and_missing_file_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["simulate", "--config", str(bad), "--out-dir", str(tmp_path)]) == 2
    assert main(["simulate", "--config", str(tmp_path / "missing.json"), "--out-dir", str(tmp_path)]) == 2


def test_truncation_exit_3(tmp_path, capsys):
    cfg = dict(PURE, wtds={"stationary": {"kind": "exp", "mu": 50.0}}, max_jumps=5, N=500)
    assert run(tmp_path, "simulate", cfg) == 3
    assert "numerical quality" in capsys.readouterr().err


def test_optimize_pair_rejected_by_simulate(tmp_path):
    assert run(tmp_path, "simulate", dict(PURE, pair="optimize")) == 2


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, dict(PURE, N=100))
    proc = subprocess.run([sys.executable, "-m", "qrenewal", "analytic", "--config", cfg, "--out-dir", str(tmp_path / "o")],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "o" / "parity.csv").exists()


def test_set_path_and_hash():
    raw = {"a": {"b": [1, 2]}}
    assert set_path(raw, "a.b.1", 5) == {"a": {"b": [1, 5]}}
    assert raw == {"a": {"b": [1, 2]}}
    with pytest.raises(ParameterError):
        set_path(raw, "a.c.0", 1)
    assert config_hash({"x": 1, "y": 2}) == config_hash({"y": 2, "x": 1})
    assert len(config_hash(raw)) == 16


def test_zero_crossings_interpolate():
    g = np.linspace(0, 1, 11)
    assert zero_crossings(g, 0.35 - g) == pytest.approx([0.35])
