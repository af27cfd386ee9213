"""Sign pattern of q(t) for Erlang waiting times over (mu1, t).

Writes ``heatmap.csv`` with a q column and prints, per mu1, the number of
sign changes and the first zero of q.
"""

import argparse
import json
from pathlib import Path

import numpy as np

from qrenewal.cli import cmd_sweep

CONFIG = Path(__file__).resolve().parents[1] / "configs" / "fig8_erlang_q.json"


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out-dir", default="out/fig8")
    args = p.parse_args()
    raw = json.loads(CONFIG.read_text())
    res = cmd_sweep(raw, Path(args.out_dir))
    data = np.loadtxt(Path(args.out_dir) / "heatmap.csv", delimiter=",", comments="#", skiprows=2)
    for cell in res["cells"]:
        rows = data[data[:, 0] == cell["param1"]]
        neg = rows[rows[:, 4] < 0]
        first = f"{neg[0, 1]:.2f}" if len(neg) else "-"
        print(f"mu1={cell['param1']:>5}: sign changes {cell['sign_changes']}, first negative q at t={first}")


if __name__ == "__main__":
    main()
