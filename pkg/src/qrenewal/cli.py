"""Command-line front end: ``qrenewal {simulate,sweep,optimize,analytic}``.

Exit codes: 0 success, 2 invalid configuration, 3 numerical-quality failure.
Every output file carries the tool version, config hash and seed, and
repeated invocations produce byte-identical files for any ``--workers``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import count_sign_changes, q_curve
from .config import ExperimentConfig, config_hash, load_config, parse_config, set_path, variants
from .ensemble import block_rng, run_ensemble
from .errors import NumericalQualityError, ParameterError
from .nonmarkov import (
    ANALYTIC_DELTA,
    DistanceCurve,
    detect_revivals,
    optimize_pair,
    pure_jump_distance,
    report_for_curve,
    revival_analysis,
)
from .trajectory import draw_jump_times_batch, evolve, JumpTimes, make_grid, write_trajectory_csv

log = logging.getLogger("qrenewal")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICS = 0, 2, 3


def _fmt(v) -> str:
    return repr(float(v))


class Outputs:
    """Writes CSV/JSON artifacts stamped with provenance metadata."""

    def __init__(self, out_dir: Path, raw: dict, seed: int):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.meta = {"tool": "qrenewal", "version": __version__, "config_hash": config_hash(raw), "seed": seed}

    def header(self) -> list[str]:
        return [" ".join(f"{k}={v}" for k, v in self.meta.items())]

    def csv(self, name: str, columns: list[str], rows) -> Path:
        path = self.dir / name
        with open(path, "w", newline="") as fh:
            for line in self.header():
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for row in rows:
                w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
        return path

    def json(self, name: str, payload: dict) -> Path:
        path = self.dir / name
        with open(path, "w") as fh:
            json.dump({"metadata": self.meta, **payload}, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def _curve_rows(curve: DistanceCurve):
    return zip(curve.grid, curve.D, curve.stderr)


def _require_pair(cfg: ExperimentConfig, command: str):
    if cfg.pair is None:
        raise ParameterError(f"'{command}' needs an explicit pair; use 'optimize' for pair search")


def cmd_simulate(raw: dict, out_dir: Path, workers: int = 1) -> dict:
    out = Outputs(out_dir, raw, int(raw.get("seed", 0)))
    results = []
    for label, vraw in variants(raw):
        cfg = parse_config(vraw)
        _require_pair(cfg, "simulate")
        ens = run_ensemble(cfg.model, cfg.T, cfg.dt_out, cfg.N, cfg.seed, workers, cfg.max_jumps)
        curve = ens.distance_curve(cfg.pair)
        rep = report_for_curve(curve, cfg.delta)
        name = "curve.csv" if label == "main" else f"curve_{label}.csv"
        out.csv(name, ["t", "D", "stderr"], _curve_rows(curve))
        plus, minus = ens.mean_curve(cfg.pair.plus.as_array()), ens.mean_curve(cfg.pair.minus.as_array())
        mean_name = "mean_bloch.csv" if label == "main" else f"mean_bloch_{label}.csv"
        out.csv(mean_name, ["t", "x_plus", "y_plus", "z_plus", "x_minus", "y_minus", "z_minus"],
                (np.concatenate([[t], p, m]) for t, p, m in zip(curve.grid, plus, minus)))
        results.append({"label": label, "config_hash": config_hash(vraw), "N": cfg.N, "T": cfg.T,
                        "truncated": ens.truncated, "curve_file": name, **rep.to_dict()})
        log.info("%s: %d revivals, measure %.6g", label, len(rep.revivals), rep.measure)
        _dump_trajectories(cfg, vraw, out, label)
    payload = {"command": "simulate", "results": results}
    out.json("report.json", payload)
    return payload


def _dump_trajectories(cfg: ExperimentConfig, raw: dict, out: Outputs, label: str):
    """Write the first trajectories of block 0, i.e. realisations used by the ensemble."""
    k = int(raw.get("dump_trajectories", 0))
    if k <= 0:
        return
    grid = make_grid(cfg.T, cfg.dt_out)
    times, _, _ = draw_jump_times_batch(cfg.model.wtds, cfg.T, min(k, cfg.N), cfg.max_jumps, block_rng(cfg.seed, 0))
    for i in range(times.shape[0]):
        jumps = JumpTimes(times[i][np.isfinite(times[i])])
        curve = evolve(cfg.pair.plus, jumps, cfg.model.generator, cfg.model.channel, grid)
        suffix = "" if label == "main" else f"_{label}"
        write_trajectory_csv(out.dir / f"trajectory{suffix}_{i}.csv", curve, tuple(out.header()))


def cmd_sweep(raw: dict, out_dir: Path, workers: int = 1) -> dict:
    spec = raw.get("sweep")
    if not spec or not spec.get("axes"):
        raise ParameterError("sweep needs 'sweep': {'axes': [...]} in the config")
    axes = spec["axes"]
    if len(axes) > 2:
        raise ParameterError("sweep supports one or two axes")
    base = {k: v for k, v in raw.items() if k != "sweep"}
    method = spec.get("method", base.get("method", "auto"))
    out = Outputs(out_dir, raw, int(raw.get("seed", 0)))
    axis1 = axes[0]
    time_axis = len(axes) == 2 and axes[1].get("param") == "t"
    values2 = [None] if len(axes) == 1 else (None if time_axis else axes[1]["values"])
    columns = ["param1", "param2", "revival_count", "measure"] + (["q"] if time_axis else [])
    rows, cells = [], []
    for v1 in axis1["values"]:
        r1 = set_path(base, axis1["param"], v1)
        if time_axis:
            cfg = parse_config(r1)
            if not cfg.model.is_pure_jump_x() and method != "analytic":
                raise ParameterError("a time axis is only available for pure x-flip dynamics")
            _require_pair(cfg, "sweep")
            grid = make_grid(cfg.T, cfg.dt_out)
            q = q_curve(cfg.model.wtds, grid).q
            rep = report_for_curve(pure_jump_distance(cfg.model, cfg.pair, grid), cfg.delta or ANALYTIC_DELTA)
            for t, qv in zip(grid, q):
                rows.append((v1, t, len(rep.revivals), rep.measure, qv))
            cells.append({"param1": v1, "revival_count": len(rep.revivals), "measure": rep.measure,
                          "sign_changes": count_sign_changes(q, atol=1e-7)})
            continue
        for v2 in values2:
            cell_raw = r1 if v2 is None else set_path(r1, axes[1]["param"], v2)
            cfg = parse_config(cell_raw)
            _require_pair(cfg, "sweep")
            _, rep, used = revival_analysis(cfg.model, cfg.pair, cfg.T, cfg.dt_out, cfg.N, cfg.seed,
                                            cfg.delta, method, workers, cfg.max_jumps)
            p2 = float("nan") if v2 is None else v2
            rows.append((v1, p2, len(rep.revivals), rep.measure))
            cells.append({"param1": v1, "param2": v2, "revival_count": len(rep.revivals),
                          "measure": rep.measure, "method": used,
                          "onsets": [r.t_onset for r in rep.revivals]})
    out.csv("heatmap.csv", columns, rows)
    payload = {"command": "sweep", "axes": axes, "method": method, "cells": cells}
    out.json("sweep.json", payload)
    return payload


def cmd_optimize(raw: dict, out_dir: Path, workers: int = 1) -> dict:
    cfg = parse_config(raw)
    out = Outputs(out_dir, raw, cfg.seed)
    rep = optimize_pair(cfg.model, cfg.T, cfg.dt_out, cfg.N, cfg.seed, workers, cfg.delta, max_jumps=cfg.max_jumps)
    out.csv("landscape.csv", ["x", "y", "z", "measure", "measure_stderr"],
            ((*d, m, s) for d, m, s in rep.optimizer_trace))
    payload = {"command": "optimize", **rep.to_dict()}
    out.json("report.json", payload)
    log.info("optimal direction %s, measure %.6g", rep.optimal_pair.plus.as_array(), rep.measure)
    return payload


def zero_crossings(grid, q) -> list[float]:
    grid, q = np.asarray(grid), np.asarray(q)
    idx = np.flatnonzero(np.sign(q[1:]) * np.sign(q[:-1]) < 0)
    return [float(grid[i] - q[i] * (grid[i + 1] - grid[i]) / (q[i + 1] - q[i])) for i in idx]


def cmd_analytic(raw: dict, out_dir: Path, workers: int = 1) -> dict:
    cfg = parse_config(raw)
    out = Outputs(out_dir, raw, cfg.seed)
    grid = make_grid(cfg.T, cfg.dt_out)
    pc = q_curve(cfg.model.wtds, grid)
    out.csv("parity.csv", ["t", "p_even", "p_odd", "q"], zip(grid, pc.p_even, pc.p_odd, pc.q))
    exact = DistanceCurve.exact(grid, np.abs(pc.q))
    payload = {
        "command": "analytic",
        "oracle": pc.method,
        "zero_crossings": zero_crossings(grid, pc.q),
        "sign_changes": count_sign_changes(pc.q, atol=1e-7),
        "revivals": [r.to_dict() for r in detect_revivals(exact, cfg.delta or ANALYTIC_DELTA)],
    }
    if cfg.model.is_pure_jump_x() and cfg.pair is not None and cfg.N > 1:
        curve = run_ensemble(cfg.model, cfg.T, cfg.dt_out, cfg.N, cfg.seed, workers, cfg.max_jumps).distance_curve(cfg.pair)
        ref = pure_jump_distance(cfg.model, cfg.pair, grid).D
        resid = np.abs(curve.D - ref)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(curve.stderr > 0, resid / curve.stderr, np.where(resid > 0, np.inf, 0.0))
        out.csv("comparison.csv", ["t", "D_mc", "stderr", "D_exact"], zip(grid, curve.D, curve.stderr, ref))
        payload["comparison"] = {
            "N": cfg.N,
            "max_residual": float(resid.max()),
            "max_residual_over_stderr": float(z.max()),
            "within_3_stderr": bool(np.all(resid <= 3 * curve.stderr)),
        }
    out.json("analytic_report.json", payload)
    return payload


COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep, "optimize": cmd_optimize, "analytic": cmd_analytic}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qrenewal", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qrenewal {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="JSON experiment config")
        s.add_argument("--seed", type=int, help="override the config seed")
        s.add_argument("--n-trajectories", "-N", type=int, dest="N", help="override the config N")
        s.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
        s.add_argument("--out-dir", default="out", help="directory for CSV/JSON outputs")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        raw = load_config(args.config)
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.N is not None:
            raw["N"] = args.N
        if args.workers < 1:
            raise ParameterError("--workers must be >= 1")
        COMMANDS[args.command](raw, Path(args.out_dir), args.workers)
    except ParameterError as exc:
        print(f"qrenewal: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalQualityError as exc:
        print(f"qrenewal: numerical quality check failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
