"""Waiting-time distributions and modified renewal sequences.

Only exponential and Erlang laws are supported. An exponential law is an
Erlang law of shape 1 and is treated as such everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

KINDS = ("exp", "erlang")


@dataclass(frozen=True)
class WtdSpec:
    kind: str
    mu: float
    r: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown waiting-time kind {self.kind!r}; expected one of {KINDS}")
        if not self.mu > 0 or not math.isfinite(self.mu):
            raise ParameterError(f"rate mu must be positive and finite, got {self.mu}")
        if int(self.r) != self.r or self.r < 1:
            raise ParameterError(f"Erlang shape r must be a positive integer, got {self.r}")
        if self.kind == "exp" and self.r != 1:
            raise ParameterError("exponential waiting times have r = 1")
        object.__setattr__(self, "r", int(self.r))

    @classmethod
    def exponential(cls, mu: float) -> WtdSpec:
        return cls("exp", float(mu), 1)

    @classmethod
    def erlang(cls, mu: float, r: int) -> WtdSpec:
        return cls("erlang", float(mu), int(r))

    @property
    def mean(self) -> float:
        return self.r / self.mu

    @property
    def variance(self) -> float:
        return self.r / self.mu**2

    def to_config(self) -> dict:
        if self.kind == "exp":
            return {"kind": "exp", "mu": self.mu}
        return {"kind": "erlang", "mu": self.mu, "r": self.r}


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ParameterError("waiting-time functions are defined for t >= 0")
    return t


def pdf(w: WtdSpec, t):
    t = _check_t(t)
    mu, r = w.mu, w.r
    # r = 1 avoids 0**0 handling in t**(r-1)
    if r == 1:
        out = mu * np.exp(-mu * t)
    else:
        out = np.exp(r * math.log(mu) + (r - 1) * np.log(np.where(t > 0, t, 1.0)) - mu * t - math.lgamma(r))
        out = np.where(t > 0, out, 0.0)
    return out if out.ndim else float(out)


def survival(w: WtdSpec, t):
    """Probability that the waiting time exceeds ``t``."""
    t = _check_t(t)
    x = w.mu * t
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, w.r):
        term = term * x / k
        total = total + term
    out = np.exp(-x) * total
    return out if out.ndim else float(out)


def sample(w: WtdSpec, rng: np.random.Generator, size=None):
    """Draw waiting times; Erlang draws are sums of ``r`` exponential draws."""
    if size is None:
        return float(rng.standard_exponential(w.r).sum() / w.mu)
    return rng.standard_exponential((w.r, size)).sum(axis=0) / w.mu


@dataclass(frozen=True)
class WtdSequence:
    """First ``k = len(modified)`` waiting times follow their own laws, the rest ``stationary``."""

    stationary: WtdSpec
    modified: tuple[WtdSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "modified", tuple(self.modified))

    @property
    def k(self) -> int:
        return len(self.modified)

    def all_specs(self) -> tuple[WtdSpec, ...]:
        return self.modified + (self.stationary,)

    def max_rate(self) -> float:
        return max(w.mu for w in self.all_specs())

    def to_config(self) -> dict:
        return {"modified": [w.to_config() for w in self.modified], "stationary": self.stationary.to_config()}


def nth_wtd(seq: WtdSequence, n: int) -> WtdSpec:
    """Law of the ``n``-th waiting time (1-based)."""
    if n < 1:
        raise ParameterError(f"waiting-time index starts at 1, got {n}")
    return seq.modified[n - 1] if n <= seq.k else seq.stationary


def wtd_from_config(spec: dict) -> WtdSpec:
    if not isinstance(spec, dict):
        raise ParameterError(f"waiting-time spec must be a mapping, got {spec!r}")
    kind = spec.get("kind")
    if kind not in KINDS:
        raise ParameterError(f"unknown waiting-time kind {kind!r}; expected one of {KINDS}")
    if "mu" not in spec:
        raise ParameterError(f"waiting-time spec {spec!r} is missing 'mu'")
    return WtdSpec(kind, float(spec["mu"]), int(spec.get("r", 1)))


def sequence_from_config(spec: dict) -> WtdSequence:
    if not isinstance(spec, dict) or "stationary" not in spec:
        raise ParameterError("'wtds' needs a 'stationary' entry")
    return WtdSequence(
        wtd_from_config(spec["stationary"]),
        tuple(wtd_from_config(s) for s in spec.get("modified", [])),
    )
