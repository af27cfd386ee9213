"""Revival detection, the trace-distance non-Markovianity measure, and pair optimisation.

A revival is a rise of the distance curve from a local minimum to the
following local maximum. To keep Monte Carlo noise from registering as
revivals, the curve is filtered with a zigzag of threshold ``delta``. A
swing counts only once the curve has moved by more than ``delta`` from the
last extremum. The measure estimate is the sum of the revival heights,
i.e. the integral of the positive part of dD/dt along the filtered curve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analytic import q_curve
from .bloch import StatePair
from .ensemble import DistanceCurve, EnsembleMoments, run_ensemble
from .errors import ParameterError
from .trajectory import DEFAULT_MAX_JUMPS, RenewalModel, make_grid

MIN_DELTA = 1e-3
ANALYTIC_DELTA = 1e-6
COARSE_FREQUENCY = 4
REFINE_FACTOR = 5


@dataclass(frozen=True)
class Revival:
    t_onset: float
    t_peak: float
    onset_value: float
    peak_value: float
    onset_stderr: float = 0.0
    peak_stderr: float = 0.0

    @property
    def height(self) -> float:
        return self.peak_value - self.onset_value

    def to_dict(self) -> dict:
        return {
            "t_onset": self.t_onset,
            "t_peak": self.t_peak,
            "onset_value": self.onset_value,
            "peak_value": self.peak_value,
            "height": self.height,
            "onset_stderr": self.onset_stderr,
            "peak_stderr": self.peak_stderr,
        }


@dataclass(eq=False)
class NmReport:
    revivals: list[Revival]
    measure: float
    delta: float
    measure_stderr: float = 0.0
    optimal_pair: StatePair | None = None
    optimizer_trace: list[tuple[np.ndarray, float, float]] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        out = {
            "measure": self.measure,
            "measure_stderr": self.measure_stderr,
            "delta": self.delta,
            "revival_count": len(self.revivals),
            "revivals": [r.to_dict() for r in self.revivals],
        }
        if self.optimal_pair is not None:
            out["optimal_pair"] = {
                "plus": self.optimal_pair.plus.as_array().tolist(),
                "minus": self.optimal_pair.minus.as_array().tolist(),
            }
        if self.optimizer_trace:
            out["optimizer_trace"] = [
                {"direction": d.tolist(), "measure": m, "measure_stderr": s} for d, m, s in self.optimizer_trace
            ]
        return out


def default_delta(curve: DistanceCurve) -> float:
    se = curve.stderr[np.isfinite(curve.stderr)]
    return max(3.0 * float(se.max()) if se.size else 0.0, MIN_DELTA)


def detect_revivals(curve: DistanceCurve, delta: float) -> list[Revival]:
    if not delta > 0:
        raise ParameterError(f"revival threshold must be positive, got {delta}")
    D = np.asarray(curve.D, dtype=float)
    if D.size == 0:
        raise ParameterError("empty distance curve")
    t, se = curve.grid, curve.stderr

    def make(i_lo, i_hi):
        return Revival(float(t[i_lo]), float(t[i_hi]), float(D[i_lo]), float(D[i_hi]), float(se[i_lo]), float(se[i_hi]))

    revivals = []
    rising = False
    lo = hi = 0
    for i in range(1, D.size):
        if not rising:
            if D[i] < D[lo]:
                lo = i
            elif D[i] - D[lo] > delta:
                rising, hi = True, i
        else:
            if D[i] > D[hi]:
                hi = i
            elif D[hi] - D[i] > delta:
                revivals.append(make(lo, hi))
                rising, lo = False, i
    if rising:
        revivals.append(make(lo, hi))
    return revivals


def blp_measure(curve: DistanceCurve, delta: float) -> float:
    return float(sum(r.height for r in detect_revivals(curve, delta)))


def _measure_stderr(revivals: list[Revival]) -> float:
    return float(np.sqrt(sum(r.onset_stderr**2 + r.peak_stderr**2 for r in revivals)))


def report_for_curve(curve: DistanceCurve, delta: float | None = None) -> NmReport:
    delta = default_delta(curve) if delta is None else delta
    revs = detect_revivals(curve, delta)
    return NmReport(revs, float(sum(r.height for r in revs)), delta, _measure_stderr(revs))


def pure_jump_distance(model: RenewalModel, pair: StatePair, grid) -> DistanceCurve:
    """Exact distance curve for pure x-flip dynamics, built on the parity oracle."""
    if not model.is_pure_jump_x():
        raise ParameterError("analytic distance needs no dephasing and x-flip jumps")
    q = q_curve(model.wtds, grid).q
    dx, dy, dz = pair.difference()
    return DistanceCurve.exact(grid, 0.5 * np.sqrt(dx * dx + q * q * (dy * dy + dz * dz)))


def icosphere(frequency: int) -> np.ndarray:
    """Unit vectors of a geodesic sphere with ``10 f^2 + 2`` vertices.

    The orientation puts the coordinate axes on icosahedron edge midpoints,
    so they are vertices whenever ``frequency`` is even.
    """
    phi = (1 + 5**0.5) / 2
    verts = np.array(
        [[-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
         [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
         [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1]], dtype=float)
    edge2 = 4.0
    faces = [
        (a, b, c)
        for a in range(12) for b in range(a + 1, 12) for c in range(b + 1, 12)
        if all(abs(((verts[u] - verts[v]) ** 2).sum() - edge2) < 1e-9 for u, v in ((a, b), (b, c), (a, c)))
    ]
    pts = []
    for a, b, c in faces:
        for i in range(frequency + 1):
            for j in range(frequency + 1 - i):
                k = frequency - i - j
                pts.append((i * verts[a] + j * verts[b] + k * verts[c]) / frequency)
    pts = np.array(pts)
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    _, idx = np.unique(np.round(pts, 9), axis=0, return_index=True)
    return pts[np.sort(idx)]


def hemisphere(directions: np.ndarray) -> np.ndarray:
    """One representative of each antipodal pair."""
    key = directions @ np.array([0.6, 0.3, 0.1]) + 0.0
    keep = key > 1e-12
    # directions orthogonal to the key vector: fall back to the first nonzero component
    tie = np.abs(key) <= 1e-12
    if tie.any():
        first = np.array([d[np.flatnonzero(np.abs(d) > 1e-12)[0]] for d in directions[tie]])
        keep[tie] = first > 0
    return directions[keep]


def _direction_measure(ens: EnsembleMoments, n: np.ndarray, delta: float | None):
    rep = report_for_curve(ens.distance_curve(StatePair.antipodal(n)), delta)
    return rep.measure, rep.measure_stderr


def optimize_pair(
    model: RenewalModel,
    T: float,
    dt_out: float | None = None,
    N: int = 100_000,
    seed: int = 0,
    workers: int = 1,
    delta: float | None = None,
    coarse_frequency: int = COARSE_FREQUENCY,
    max_jumps: int = DEFAULT_MAX_JUMPS,
) -> NmReport:
    """Search antipodal pure pairs for the largest measure.

    All directions share one ensemble, so every direction is scored on the
    same N trajectories. The coarse mesh is followed by one pass over a
    mesh ``REFINE_FACTOR`` times finer, limited to a cap of one coarse
    spacing around the coarse optimum.
    """
    ens = run_ensemble(model, T, dt_out, N, seed, workers, max_jumps)
    coarse = hemisphere(icosphere(coarse_frequency))
    trace = []
    for n in coarse:
        m, s = _direction_measure(ens, n, delta)
        trace.append((n, m, s))
    best = max(trace, key=lambda e: e[1])
    spacing = np.arccos(np.clip(np.sort(coarse @ coarse[0])[-2], -1, 1)) * 1.05
    fine = icosphere(coarse_frequency * REFINE_FACTOR)
    cap = fine[np.abs(fine @ best[0]) >= np.cos(spacing)]
    for n in hemisphere(cap):
        if np.min(np.linalg.norm(coarse - n, axis=1)) < 1e-9:
            continue
        m, s = _direction_measure(ens, n, delta)
        trace.append((n, m, s))
        if m > best[1]:
            best = (n, m, s)
    pair = StatePair.antipodal(best[0])
    rep = report_for_curve(ens.distance_curve(pair), delta)
    rep.optimal_pair = pair
    rep.optimizer_trace = trace
    return rep


@dataclass(frozen=True)
class SweepCell:
    param1: float
    param2: float
    revival_count: int
    measure: float
    method: str


def revival_analysis(
    model: RenewalModel,
    pair: StatePair,
    T: float,
    dt_out: float | None = None,
    N: int = 100_000,
    seed: int = 0,
    delta: float | None = None,
    method: str = "auto",
    workers: int = 1,
    max_jumps: int = DEFAULT_MAX_JUMPS,
) -> tuple[DistanceCurve, NmReport, str]:
    """Distance curve and revivals by Monte Carlo or, for pure x-flip dynamics, exactly."""
    if method not in ("auto", "mc", "analytic"):
        raise ParameterError(f"method must be auto, mc or analytic, got {method!r}")
    if method == "analytic" or (method == "auto" and model.is_pure_jump_x()):
        curve = pure_jump_distance(model, pair, make_grid(T, dt_out))
        return curve, report_for_curve(curve, ANALYTIC_DELTA if delta is None else delta), "analytic"
    curve = run_ensemble(model, T, dt_out, N, seed, workers, max_jumps).distance_curve(pair)
    return curve, report_for_curve(curve, delta), "mc"


def count_revivals_sweep(cells, pair: StatePair, T: float, dt_out=None, N: int = 100_000, seed: int = 0,
                         delta: float | None = None, method: str = "auto", workers: int = 1) -> list[SweepCell]:
    """Revival count and measure for each ``(param1, param2, model)`` in ``cells``."""
    out = []
    for p1, p2, model in cells:
        _, rep, used = revival_analysis(model, pair, T, dt_out, N, seed, delta, method, workers)
        out.append(SweepCell(float(p1), float(p2), len(rep.revivals), rep.measure, used))
    return out
