"""False-revival rate of the default threshold on Markovian curves.

For unmodified exponential waiting times the exact curve decreases
monotonically, so every detected revival is noise. Reports the fraction
of seeds with at least one detection for a few threshold multipliers.
"""

import argparse

import numpy as np

from qrenewal.bloch import StatePair, pauli_x
from qrenewal.dephasing import DephasingGenerator
from qrenewal.ensemble import run_ensemble
from qrenewal.nonmarkov import detect_revivals
from qrenewal.trajectory import RenewalModel
from qrenewal.wtd import WtdSequence, WtdSpec


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, default=200)
    p.add_argument("--N", type=int, default=10_000)
    p.add_argument("--T", type=float, default=3.0)
    args = p.parse_args()
    model = RenewalModel(pauli_x(), DephasingGenerator(0, 0, 0), WtdSequence(WtdSpec.exponential(1.0)))
    pair = StatePair.antipodal([0, 1, 0])
    factors = (1.0, 2.0, 3.0, 4.0)
    hits = np.zeros(len(factors), dtype=int)
    z_max = []
    for seed in range(args.seeds):
        c = run_ensemble(model, args.T, 0.01, args.N, seed).distance_curve(pair)
        se = c.stderr.max()
        z_max.append(np.max(np.abs(c.D - np.exp(-2 * c.grid)) / np.where(c.stderr > 0, c.stderr, np.inf)))
        for i, f in enumerate(factors):
            hits[i] += bool(detect_revivals(c, f * se))
    for f, h in zip(factors, hits):
        print(f"delta = {f:.0f} x max stderr: false-revival rate {h / args.seeds:.3f}")
    z_max = np.array(z_max)
    print(f"max pointwise |D - exp(-2t)| / stderr: median {np.median(z_max):.2f}, "
          f"fraction above 3: {np.mean(z_max > 3):.3f}")


if __name__ == "__main__":
    main()
