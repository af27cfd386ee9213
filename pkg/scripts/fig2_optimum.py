"""Measure landscape over antipodal pure pairs and its optimum.

Writes ``landscape.csv`` (one row per direction) and ``report.json``; the
optimum for x-flip-after-damping jumps lies on the y axis.
"""

import argparse
import json
from pathlib import Path

from qrenewal.cli import cmd_optimize

CONFIG = Path(__file__).resolve().parents[1] / "configs" / "fig2_optimum.json"


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--config", default=str(CONFIG))
    p.add_argument("--N", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", default="out/fig2")
    args = p.parse_args()
    raw = json.loads(Path(args.config).read_text())
    if args.N:
        raw["N"] = args.N
    rep = cmd_optimize(raw, Path(args.out_dir), args.workers)
    best = rep["optimal_pair"]["plus"]
    print(f"optimal direction {[round(v, 4) for v in best]}  measure {rep['measure']:.4f} +- {rep['measure_stderr']:.4f}")
    for d in rep["optimizer_trace"]:
        if max(abs(v) for v in d["direction"]) > 1 - 1e-9:
            print(f"  axis {d['direction']}: {d['measure']:.4f} +- {d['measure_stderr']:.4f}")


if __name__ == "__main__":
    main()
