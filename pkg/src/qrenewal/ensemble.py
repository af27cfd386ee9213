"""Monte Carlo estimate of the trace distance between two evolved states.

Every realisation draws one set of jump times. That set acts on all
initial states through the realisation's affine map ``r0 -> A r0 + b``.
For a pair the per-realisation coordinate difference is
``Delta_n = A_n (r+ - r-)``. The differences are averaged over realisations
first, and the distance is half the norm of that average. This is not the
average of per-trajectory distances.

The ensemble keeps the first and second moments of ``A``, so one pass
serves any pair of initial states. The pair optimiser relies on this.

Reproducibility: trajectories are grouped into fixed-size blocks and block
``i`` draws from its own Philox stream spawned from ``(seed, i)``. Block sums
are merged in block order, so results do not depend on the worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bloch import StatePair
from .errors import ParameterError, TruncationError
from .trajectory import (
    DEFAULT_MAX_JUMPS,
    BatchMaps,
    RenewalModel,
    draw_jump_times_batch,
    jump_counts_on_grid,
    make_grid,
)

BLOCK_SIZE = 1000
GRID_CHUNK = 128
MAX_TRUNCATED_FRACTION = 1e-6
DEFAULT_N = 100_000


@dataclass(frozen=True, eq=False)
class DistanceCurve:
    grid: np.ndarray
    D: np.ndarray
    stderr: np.ndarray
    N: int = 0
    seed: int | None = None

    @classmethod
    def exact(cls, grid, values) -> DistanceCurve:
        """Noise-free curve, e.g. from a closed form."""
        values = np.asarray(values, dtype=float)
        return cls(np.asarray(grid, dtype=float), values, np.zeros_like(values))


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _block_sums(task):
    model, grid, T, seed, block, n, max_jumps = task
    rng = block_rng(seed, block)
    times, _, truncated = draw_jump_times_batch(model.wtds, T, n, max_jumps, rng)
    maps = BatchMaps.build(times, model.generator, model.channel)
    counts = jump_counts_on_grid(times, grid)
    G = grid.size
    k = 3 if maps.diagonal else 9
    sum_a = np.zeros((G, k))
    sum_b = np.zeros((G, 3))
    sum_aa = np.zeros((G, k, k))
    for start in range(0, G, GRID_CHUNK):
        sl = slice(start, min(start + GRID_CHUNK, G))
        a, b = maps.at(grid[sl], counts[:, sl])
        flat = a.reshape(n, -1, k)
        sum_a[sl] = flat.sum(axis=0)
        sum_b[sl] = b.sum(axis=0)
        ft = np.ascontiguousarray(flat.transpose(1, 2, 0))
        sum_aa[sl] = np.einsum("gib,gjb->gij", ft, ft)
    return maps.diagonal, sum_a, sum_b, sum_aa, int(truncated.sum())


@dataclass(frozen=True, eq=False)
class EnsembleMoments:
    """Realisation averages of the affine maps on a time grid.

    ``mean_A[g]`` and ``mean_b[g]`` give the averaged dynamical map at
    ``grid[g]``. ``second[g, 3*i+j, 3*k+l]`` is the mean of ``A_ij * A_kl``.
    """

    grid: np.ndarray
    mean_A: np.ndarray = field(repr=False)
    mean_b: np.ndarray = field(repr=False)
    second: np.ndarray = field(repr=False)
    N: int
    seed: int
    truncated: int = 0

    def mean_curve(self, r0) -> np.ndarray:
        return np.einsum("gij,j->gi", self.mean_A, np.asarray(r0, dtype=float)) + self.mean_b

    def delta_stats(self, d) -> tuple[np.ndarray, np.ndarray]:
        """Mean of ``A d`` and covariance matrix of that mean, per grid point."""
        d = np.asarray(d, dtype=float)
        m = np.einsum("gij,j->gi", self.mean_A, d)
        s = self.second.reshape(-1, 3, 3, 3, 3)
        raw = np.einsum("gijkl,j,l->gik", s, d, d)
        if self.N > 1:
            cov = (raw - m[:, :, None] * m[:, None, :]) / (self.N - 1)
        else:
            cov = np.full_like(raw, np.nan)
        return m, cov

    def distance_curve(self, pair: StatePair) -> DistanceCurve:
        m, cov = self.delta_stats(pair.difference())
        D = 0.5 * np.linalg.norm(m, axis=1)
        var_comp = np.clip(np.diagonal(cov, axis1=1, axis2=2), 0.0, None)
        floor = 0.5 * np.sqrt(var_comp.max(axis=1))
        norm2 = np.einsum("gi,gi->g", m, m)
        quad = np.einsum("gi,gik,gk->g", m, cov, m)
        with np.errstate(invalid="ignore", divide="ignore"):
            delta = 0.5 * np.sqrt(np.clip(quad, 0.0, None) / norm2)
        delta = np.where(norm2 > 0, delta, 0.0)
        stderr = np.maximum(delta, floor)
        return DistanceCurve(self.grid, D, stderr, self.N, self.seed)


def run_ensemble(
    model: RenewalModel,
    T: float,
    dt_out: float | None = None,
    N: int = DEFAULT_N,
    seed: int = 0,
    workers: int = 1,
    max_jumps: int = DEFAULT_MAX_JUMPS,
) -> EnsembleMoments:
    if N < 1:
        raise ParameterError(f"need at least one trajectory, got N={N}")
    grid = make_grid(T, dt_out)
    tasks = [
        (model, grid, T, seed, i, min(BLOCK_SIZE, N - start), max_jumps)
        for i, start in enumerate(range(0, N, BLOCK_SIZE))
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_block_sums, tasks))
    else:
        results = [_block_sums(t) for t in tasks]

    diagonal = results[0][0]
    sum_a, sum_b, sum_aa = (r.copy() for r in results[0][1:4])
    truncated = results[0][4]
    for _, a, b, aa, tr in results[1:]:
        sum_a += a
        sum_b += b
        sum_aa += aa
        truncated += tr
    if truncated > MAX_TRUNCATED_FRACTION * N:
        raise TruncationError(
            f"{truncated} of {N} trajectories reached max_jumps={max_jumps} before T={T}; "
            "raise max_jumps or shorten T"
        )

    G = grid.size
    if diagonal:
        mean_A = np.zeros((G, 3, 3))
        mean_A[:, [0, 1, 2], [0, 1, 2]] = sum_a / N
        second = np.zeros((G, 9, 9))
        diag_idx = np.array([0, 4, 8])
        second[:, diag_idx[:, None], diag_idx[None, :]] = sum_aa / N
    else:
        mean_A = (sum_a / N).reshape(G, 3, 3)
        second = sum_aa / N
    return EnsembleMoments(grid, mean_A, sum_b / N, second, N, seed, truncated)


def estimate_distance_curve(
    pair: StatePair,
    model: RenewalModel,
    T: float,
    dt_out: float | None = None,
    N: int = DEFAULT_N,
    seed: int = 0,
    workers: int = 1,
    max_jumps: int = DEFAULT_MAX_JUMPS,
) -> DistanceCurve:
    return run_ensemble(model, T, dt_out, N, seed, workers, max_jumps).distance_curve(pair)


def mean_bloch_curves(
    pair: StatePair,
    model: RenewalModel,
    T: float,
    dt_out: float | None = None,
    N: int = DEFAULT_N,
    seed: int = 0,
    workers: int = 1,
    max_jumps: int = DEFAULT_MAX_JUMPS,
) -> tuple[np.ndarray, np.ndarray]:
    """Averaged Bloch vectors of both initial states, each of shape ``(G, 3)``."""
    ens = run_ensemble(model, T, dt_out, N, seed, workers, max_jumps)
    return ens.mean_curve(pair.plus.as_array()), ens.mean_curve(pair.minus.as_array())
