"""Exact jump-parity results for pure-jump dynamics with x-flip jumps.

With no evolution between jumps and the x flip as the jump channel, only
the parity of the number of jumps matters. For the pair on the y axis the
trace distance equals ``|q(t)|``, where ``q = p_even - p_odd``.

Closed forms cover the cases where the Laplace-domain expressions invert
easily. Everything else goes through :func:`parity_series`, which builds
``P(n-th jump <= t)`` by repeated convolution in the time domain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import ParameterError, ResolutionError
from .wtd import WtdSequence, WtdSpec, nth_wtd, pdf, survival

DEFAULT_TOL = 1e-8
SINGULAR_REL = 1e-6
MAX_INTERNAL_POINTS = 1 << 22


@dataclass(frozen=True, eq=False)
class ParityCurve:
    grid: np.ndarray
    p_even: np.ndarray
    p_odd: np.ndarray
    method: str = ""

    @property
    def q(self) -> np.ndarray:
        return self.p_even - self.p_odd

    @classmethod
    def from_q(cls, grid, q, method: str) -> ParityCurve:
        q = np.asarray(q, dtype=float)
        return cls(np.asarray(grid, dtype=float), 0.5 * (1 + q), 0.5 * (1 - q), method)


def _positive(**rates):
    for name, v in rates.items():
        if not v > 0:
            raise ParameterError(f"{name} must be positive, got {v}")


def q_markov(mu: float, t):
    _positive(mu=mu)
    return np.exp(-2.0 * mu * np.asarray(t, dtype=float))


def q_exp_2wtd(mu: float, mu1: float, t):
    """First waiting time exponential with rate ``mu1``, the rest with rate ``mu``."""
    _positive(mu=mu, mu1=mu1)
    t = np.asarray(t, dtype=float)
    eps = 2.0 * mu - mu1
    if abs(eps) < SINGULAR_REL * mu:
        # first-order expansion around mu1 = 2 mu
        return np.exp(-2.0 * mu * t) * ((1.0 - 2.0 * mu * t) + eps * (2.0 * t - mu * t * t))
    return (2.0 * (mu - mu1) * np.exp(-mu1 * t) + mu1 * np.exp(-2.0 * mu * t)) / eps


def revival_time_exp_2wtd(mu: float, mu1: float) -> float | None:
    """Zero of :func:`q_exp_2wtd`, or ``None`` when ``mu1 <= mu`` and ``q`` never vanishes."""
    _positive(mu=mu, mu1=mu1)
    if mu1 <= mu:
        return None
    eps = 2.0 * mu - mu1
    if abs(eps) < SINGULAR_REL * mu:
        return 1.0 / mu1
    return -np.log(2.0 * (mu1 - mu) / mu1) / eps


def q_erlang2(mu: float, t):
    """Unmodified Erlang waiting times of shape 2."""
    _positive(mu=mu)
    x = mu * np.asarray(t, dtype=float)
    return np.exp(-x) * (np.sin(x) + np.cos(x))


def q_erlang_unmodified(mu: float, r: int, grid, tol: float = DEFAULT_TOL) -> ParityCurve:
    _positive(mu=mu)
    if r < 1:
        raise ParameterError(f"Erlang shape must be >= 1, got {r}")
    grid = np.asarray(grid, dtype=float)
    if r == 1:
        return ParityCurve.from_q(grid, q_markov(mu, grid), "closed:markov")
    if r == 2:
        return ParityCurve.from_q(grid, q_erlang2(mu, grid), "closed:erlang2")
    return parity_series(WtdSequence(WtdSpec.erlang(mu, r)), grid, tol)


def q_erlang_modified_22(mu: float, mu1: float, t):
    """Both laws Erlang of shape 2; the first waiting time has rate ``mu1``."""
    _positive(mu=mu, mu1=mu1)
    t = np.asarray(t, dtype=float)
    a, m = mu1, mu
    den = (2 * m * m - 2 * a * m + a * a) ** 2
    poly = a**3 - 3 * a * a * m + 2 * a * m * m - 2 * m**3 + t * a * (a**3 - 3 * a * a * m + 4 * a * m * m - 2 * m**3)
    first = 2 * (a - m) * np.exp(-a * t) * poly
    osc = ((2 * m - a) ** 2 - 2 * m * m) * np.cos(m * t) - (2 * m * m - a * a) * np.sin(m * t)
    return (first - a * a * np.exp(-m * t) * osc) / den


def _trapezoid_conv(c: np.ndarray, f: np.ndarray, h: float) -> np.ndarray:
    """``int_0^t c(t - s) f(s) ds`` on a uniform grid by the trapezoid rule."""
    full = fftconvolve(c, f)[: c.size]
    return h * (full - 0.5 * (c * f[0] + c[0] * f))


def _series_at_step(seq: WtdSequence, T: float, n_int: int, stride: int, tol: float):
    """Even/odd probabilities on an internal grid of ``n_int`` steps, sampled every ``stride``."""
    h = T / n_int
    s = np.arange(n_int + 1) * h
    cdfs = [np.ones(n_int + 1)]  # P(T_0 <= t) = 1
    n = 0
    while True:
        n += 1
        w = nth_wtd(seq, n)
        if n == 1:
            nxt = 1.0 - survival(w, s)
        else:
            nxt = _trapezoid_conv(cdfs[-1], pdf(w, s), h)
        cdfs.append(nxt)
        # the alternating tail is bounded by the first omitted cdf
        if nxt[-1] < 0.1 * tol or n > 100_000:
            break
    cdfs = np.array(cdfs)[:, ::stride]
    p = cdfs[:-1] - cdfs[1:]
    return p[0::2].sum(axis=0), p[1::2].sum(axis=0), n


def parity_series(seq: WtdSequence, grid, tol: float = DEFAULT_TOL) -> ParityCurve:
    """Even/odd jump-number probabilities from the convolution series.

    ``P(T_n <= t)`` is built iteratively as ``P(T_{n-1} <= .) * f_n``. The
    trapezoid convolutions are run at three internal resolutions and
    Romberg-extrapolated. The internal resolution is refined until the
    extrapolation error estimate falls below ``tol``.
    """
    if not tol > 0:
        raise ParameterError(f"tolerance must be positive, got {tol}")
    grid = np.asarray(grid, dtype=float)
    if grid.size < 2 or grid[0] != 0:
        raise ParameterError("grid must start at 0 and have at least two points")
    steps = np.diff(grid)
    if np.ptp(steps) > 1e-9 * steps.mean():
        raise ParameterError("parity_series needs a uniform grid")
    T = grid[-1]
    n_out = grid.size - 1
    # start around 20 internal points per fastest time scale
    base = max(1, int(np.ceil(20 * seq.max_rate() * T / n_out)))
    while True:
        levels = []
        for m in (base, 2 * base, 4 * base):
            if n_out * m > MAX_INTERNAL_POINTS:
                raise ResolutionError(
                    f"convolution series needs more than {MAX_INTERNAL_POINTS} internal points to reach tol={tol}"
                )
            levels.append(_series_at_step(seq, T, n_out * m, m, tol))
        (e0, o0, _), (e1, o1, _), (e2, o2, _) = levels
        r1a_e, r1b_e = (4 * e1 - e0) / 3, (4 * e2 - e1) / 3
        r1a_o, r1b_o = (4 * o1 - o0) / 3, (4 * o2 - o1) / 3
        pe = (16 * r1b_e - r1a_e) / 15
        po = (16 * r1b_o - r1a_o) / 15
        err = max(np.abs(pe - r1b_e).max(), np.abs(po - r1b_o).max())
        if err < tol:
            return ParityCurve(grid, pe, po, "series")
        base *= 2


def count_sign_changes(q, atol: float = 0.0) -> int:
    """Strict sign changes along ``q``; entries with ``|q| <= atol`` are skipped."""
    q = np.asarray(q, dtype=float)
    signs = np.sign(q[np.abs(q) > atol])
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def q_curve(seq: WtdSequence, grid, tol: float = DEFAULT_TOL) -> ParityCurve:
    """Best available oracle for ``q`` on ``grid``: a closed form when one applies."""
    grid = np.asarray(grid, dtype=float)
    st, mod = seq.stationary, seq.modified
    if not mod:
        if st.r == 1:
            return ParityCurve.from_q(grid, q_markov(st.mu, grid), "closed:markov")
        if st.r == 2:
            return ParityCurve.from_q(grid, q_erlang2(st.mu, grid), "closed:erlang2")
    elif len(mod) == 1:
        f1 = mod[0]
        if st.r == 1 and f1.r == 1:
            return ParityCurve.from_q(grid, q_exp_2wtd(st.mu, f1.mu, grid), "closed:exp-2wtd")
        if st.r == 2 and f1.r == 2:
            return ParityCurve.from_q(grid, q_erlang_modified_22(st.mu, f1.mu, grid), "closed:erlang-22")
    return parity_series(seq, grid, tol)
