"""Single realisations of a quantum renewal process.

A realisation is a list of jump times drawn from the (modified) renewal
sequence on ``[0, T]``. Between jumps the Bloch vector decays under the
dephasing semigroup and at each jump the jump channel is applied once.
Everything is evaluated in closed form, so there is no time-step error.

Two paths are provided. :func:`draw_jump_times` and :func:`evolve` handle one
trajectory at a time and serve as the readable reference. The batched pair
:func:`draw_jump_times_batch` / :func:`affine_maps` produces, for many
trajectories at once, the affine map ``r0 -> A(t) r0 + b(t)`` that each
realisation applies to an arbitrary initial state. The ensemble estimator
is built on the batched path.

A jump that falls exactly on a grid point is applied before the state at
that point is evaluated.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .bloch import AffineChannel, BlochVector
from .dephasing import DephasingGenerator
from .errors import ParameterError
from .wtd import WtdSequence, nth_wtd, sample

DEFAULT_MAX_JUMPS = 10_000


@dataclass(frozen=True, eq=False)
class RenewalModel:
    """Jump channel, dephasing between jumps, and waiting-time sequence."""

    channel: AffineChannel
    generator: DephasingGenerator
    wtds: WtdSequence

    def is_pure_jump_x(self) -> bool:
        """No evolution between jumps and jumps are the x flip."""
        return (
            self.generator.is_trivial()
            and np.array_equal(self.channel.matrix, np.diag([1.0, -1.0, -1.0]))
            and not self.channel.translation.any()
        )


@dataclass(frozen=True)
class JumpTimes:
    times: tuple[float, ...]
    truncated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ParameterError("jump times must be strictly increasing")
        if self.times and self.times[0] <= 0:
            raise ParameterError("jump times must be positive")

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True, eq=False)
class TrajectoryCurve:
    grid: np.ndarray
    states: np.ndarray = field(repr=False)

    def state(self, i: int) -> BlochVector:
        return BlochVector.from_array(self.states[i])


def make_grid(T: float, dt_out: float | None = None) -> np.ndarray:
    """Uniform grid ``0, dt, ..., T``; ``dt_out`` must divide ``T``. Default ``T/1000``."""
    if not T > 0:
        raise ParameterError(f"final time T must be positive, got {T}")
    if dt_out is None:
        n = 1000
    else:
        if not dt_out > 0:
            raise ParameterError(f"grid step must be positive, got {dt_out}")
        n = int(round(T / dt_out))
        if n < 1 or abs(n * dt_out - T) > 1e-9 * T:
            raise ParameterError(f"grid step {dt_out} does not divide T = {T}")
    return np.arange(n + 1) * (T / n)


def draw_jump_times(seq: WtdSequence, T: float, max_jumps: int, rng: np.random.Generator) -> JumpTimes:
    if not T > 0 or max_jumps < 1:
        raise ParameterError("need T > 0 and max_jumps >= 1")
    times = []
    t = 0.0
    while len(times) < max_jumps:
        t += sample(nth_wtd(seq, len(times) + 1), rng)
        if t > T:
            return JumpTimes(times, truncated=False)
        times.append(t)
    return JumpTimes(times, truncated=True)


def evolve(
    initial: BlochVector,
    jumps: JumpTimes,
    gen: DephasingGenerator,
    channel: AffineChannel,
    grid: np.ndarray,
) -> TrajectoryCurve:
    grid = np.asarray(grid, dtype=float)
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise ParameterError("grid must be strictly increasing")
    lam = gen.lambdas
    states = np.empty((grid.size, 3))
    r = initial.as_array()
    t_last = 0.0
    k = 0
    for i, t in enumerate(grid):
        while k < len(jumps) and jumps.times[k] <= t:
            r = channel.matrix @ (np.exp(-lam * (jumps.times[k] - t_last)) * r) + channel.translation
            t_last = jumps.times[k]
            k += 1
        states[i] = np.exp(-lam * (t - t_last)) * r
        if states[i] @ states[i] > 1.0 + 1e-9:
            raise RuntimeError(f"non-physical state {states[i]} at t={t}; the jump channel is not CPTP")
    return TrajectoryCurve(grid, states)


def draw_jump_times_batch(
    seq: WtdSequence, T: float, n: int, max_jumps: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Jump times of ``n`` independent trajectories.

    Returns ``(times, counts, truncated)``; ``times`` has shape ``(n, J)``
    padded with ``inf`` beyond each trajectory's ``counts`` jumps.
    """
    cum = np.zeros(n)
    active = np.ones(n, dtype=bool)
    columns = []
    j = 0
    while active.any() and j < max_jumps:
        j += 1
        idx = np.flatnonzero(active)
        cum[idx] += sample(nth_wtd(seq, j), rng, size=idx.size)
        active[idx] = cum[idx] <= T
        columns.append(np.where(active, cum, np.inf))
    times = np.column_stack(columns) if columns else np.empty((n, 0))
    counts = np.isfinite(times).sum(axis=1)
    return times, counts, active


@dataclass(eq=False)
class BatchMaps:
    """Per-trajectory jump records in a form ready for grid evaluation.

    ``lin`` holds the linear part right after each jump (index 0 is the
    start), either as full 3x3 matrices or, when every map involved is
    diagonal, as their diagonals. ``trans`` holds the matching translations.
    """

    event_times: np.ndarray
    lin: np.ndarray
    trans: np.ndarray
    lambdas: np.ndarray
    diagonal: bool

    @classmethod
    def build(cls, times: np.ndarray, gen: DephasingGenerator, channel: AffineChannel) -> BatchMaps:
        n, J = times.shape
        lam = gen.lambdas
        diagonal = channel.is_diagonal()
        event_times = np.concatenate([np.zeros((n, 1)), times], axis=1)
        trans = np.zeros((n, J + 1, 3))
        if diagonal:
            m = np.diag(channel.matrix)
            lin = np.ones((n, J + 1, 3))
        else:
            m = channel.matrix
            lin = np.broadcast_to(np.eye(3), (n, J + 1, 3, 3)).copy()
        c = channel.translation
        for j in range(1, J + 1):
            # padded entries are never read back; keep them finite
            valid = np.isfinite(times[:, j - 1])
            gap = np.zeros(n)
            gap[valid] = event_times[valid, j] - event_times[valid, j - 1]
            decay = np.exp(-np.outer(gap, lam))
            if diagonal:
                lin[:, j] = m * decay * lin[:, j - 1]
                trans[:, j] = m * decay * trans[:, j - 1] + c
            else:
                lin[:, j] = np.einsum("ij,bjk->bik", m, decay[:, :, None] * lin[:, j - 1])
                trans[:, j] = np.einsum("ij,bj->bi", m, decay * trans[:, j - 1]) + c
        return cls(event_times, lin, trans, lam, diagonal)

    def at(self, grid: np.ndarray, counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Affine maps at grid times; ``counts[b, g]`` is the number of jumps of ``b`` up to ``grid[g]``."""
        n, width = self.event_times.shape
        flat = counts + (np.arange(n) * width)[:, None]
        lin = self.lin.reshape(n * width, *self.lin.shape[2:])[flat]
        trans = self.trans.reshape(n * width, 3)[flat]
        lam = self.lambdas
        if not lam.any():
            return lin, trans
        elapsed = grid[None, :] - self.event_times.reshape(-1)[flat]
        if lam[0] == lam[1] == lam[2]:
            decay = np.exp(-lam[0] * elapsed)[..., None]
        else:
            decay = np.exp(-elapsed[..., None] * lam)
        a = decay * lin if self.diagonal else decay[..., None] * lin
        return a, decay * trans


def jump_counts_on_grid(times: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """``counts[b, g]``: jumps of trajectory ``b`` at times ``<= grid[g]``."""
    n = times.shape[0]
    rows, cols = np.nonzero(np.isfinite(times))
    first = np.searchsorted(grid, times[rows, cols], side="left")
    hist = np.bincount(rows * (grid.size + 1) + first, minlength=n * (grid.size + 1))
    return np.cumsum(hist.reshape(n, grid.size + 1)[:, :-1], axis=1)


def affine_maps(
    times: np.ndarray, gen: DephasingGenerator, channel: AffineChannel, grid: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Full ``(A, b)`` with shapes ``(n, G, 3, 3)`` and ``(n, G, 3)``."""
    maps = BatchMaps.build(times, gen, channel)
    a, b = maps.at(np.asarray(grid, dtype=float), jump_counts_on_grid(times, grid))
    if maps.diagonal:
        a = a[..., :, None] * np.eye(3)
    return a, b


def write_trajectory_csv(path, curve: TrajectoryCurve, header_lines: tuple[str, ...] = ()) -> None:
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x", "y", "z"])
        for t, (x, y, z) in zip(curve.grid, curve.states):
            w.writerow([repr(float(t)), repr(float(x)), repr(float(y)), repr(float(z))])
