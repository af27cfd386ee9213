"""Unital Pauli-dephasing generator used for the evolution between jumps.

The generator ``L[rho] = sum_k gamma_k/2 (sigma_k rho sigma_k - rho)`` is
diagonal in the Pauli basis: the Bloch component ``i`` decays as
``exp(-lambda_i t)`` with ``lambda_i = gamma_j + gamma_k``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .bloch import AffineChannel, BlochVector
from .errors import ParameterError


@dataclass(frozen=True)
class DephasingGenerator:
    gamma1: float = 0.0
    gamma2: float = 0.0
    gamma3: float = 0.0

    def __post_init__(self):
        if min(self.gammas) < 0:
            raise ParameterError(f"dephasing rates must be nonnegative, got {self.gammas}")

    @classmethod
    def from_lambdas(cls, lambdas) -> DephasingGenerator:
        l1, l2, l3 = (float(v) for v in lambdas)
        g = (0.5 * (l2 + l3 - l1), 0.5 * (l1 + l3 - l2), 0.5 * (l1 + l2 - l3))
        # roundoff on equal lambdas can give -0.0 or -1e-17
        g = tuple(0.0 if abs(v) < 1e-14 else v for v in g)
        if min(g) < 0:
            raise ParameterError(
                f"decay rates {tuple(lambdas)} need negative Pauli rates {g}; "
                "each lambda_i must not exceed the sum of the other two"
            )
        return cls(*g)

    @property
    def gammas(self) -> tuple[float, float, float]:
        return (self.gamma1, self.gamma2, self.gamma3)

    @property
    def lambdas(self) -> np.ndarray:
        g1, g2, g3 = self.gammas
        return np.array([g2 + g3, g1 + g3, g1 + g2])

    def is_trivial(self) -> bool:
        return not any(self.gammas)


def _check_dt(dt):
    if np.any(np.asarray(dt) < 0):
        raise ParameterError(f"propagation time must be nonnegative, got {dt}")


def propagate(g: DephasingGenerator, v: BlochVector, dt: float) -> BlochVector:
    _check_dt(dt)
    return BlochVector.from_array(np.exp(-g.lambdas * dt) * v.as_array())


def as_channel(g: DephasingGenerator, dt: float) -> AffineChannel:
    _check_dt(dt)
    return AffineChannel(np.diag(np.exp(-g.lambdas * dt)), np.zeros(3), f"exp(L*{dt:g})")


def generator_from_config(spec: dict | None) -> DephasingGenerator:
    """``{"gammas": [...]}`` or ``{"lambdas": [...]}``; lambdas win if both are given."""
    if not spec:
        return DephasingGenerator()
    if "lambdas" in spec:
        if "gammas" in spec:
            warnings.warn("generator spec has both gammas and lambdas; using lambdas", stacklevel=2)
        lam = spec["lambdas"]
        if len(lam) != 3:
            raise ParameterError(f"lambdas must have three entries, got {lam!r}")
        return DephasingGenerator.from_lambdas(lam)
    if "gammas" in spec:
        gam = spec["gammas"]
        if len(gam) != 3:
            raise ParameterError(f"gammas must have three entries, got {gam!r}")
        return DephasingGenerator(*(float(v) for v in gam))
    raise ParameterError(f"generator spec needs 'gammas' or 'lambdas', got {spec!r}")
