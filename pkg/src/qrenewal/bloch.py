"""Qubit states as Bloch vectors and channels as affine maps of the Bloch ball.

A qubit state ``rho = (1 + r.sigma)/2`` is stored as its Bloch vector ``r``.
Every CPTP qubit map acts on ``r`` as ``r -> M r + c``, so channels are kept
as the pair ``(M, c)``; composition is matrix algebra and no complex
arithmetic is needed when propagating trajectories.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

BALL_TOL = 1e-9
ALGEBRA_TOL = 1e-12


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.norm() > 1.0 + 1e-12:
            raise ParameterError(f"Bloch vector {self.as_array()} lies outside the unit ball")

    @classmethod
    def from_array(cls, v) -> BlochVector:
        v = np.asarray(v, dtype=float)
        if v.shape != (3,):
            raise ParameterError(f"expected a 3-vector, got shape {v.shape}")
        return cls(float(v[0]), float(v[1]), float(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))

    def __neg__(self) -> BlochVector:
        return BlochVector(-self.x, -self.y, -self.z)


@dataclass(frozen=True)
class StatePair:
    """Two initial states whose distinguishability is followed in time."""

    plus: BlochVector
    minus: BlochVector

    @classmethod
    def antipodal(cls, direction) -> StatePair:
        """Orthogonal pure pair ``(+n, -n)`` for a (not necessarily unit) direction."""
        n = np.asarray(direction, dtype=float)
        norm = np.linalg.norm(n)
        if norm == 0:
            raise ParameterError("direction must be nonzero")
        n = n / norm
        return cls(BlochVector.from_array(n), BlochVector.from_array(-n))

    def difference(self) -> np.ndarray:
        return self.plus.as_array() - self.minus.as_array()

    def is_antipodal_pure(self, tol: float = 1e-9) -> bool:
        p, m = self.plus.as_array(), self.minus.as_array()
        return bool(np.allclose(p, -m, atol=tol) and abs(np.linalg.norm(p) - 1.0) < tol)


def trace_distance(a: BlochVector, b: BlochVector) -> float:
    """Half the Euclidean distance between two Bloch vectors."""
    return 0.5 * float(np.linalg.norm(a.as_array() - b.as_array()))


@dataclass(frozen=True, eq=False)
class AffineChannel:
    """Qubit channel acting on Bloch vectors as ``r -> matrix @ r + translation``."""

    matrix: np.ndarray
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    label: str = "custom"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        c = np.array(self.translation, dtype=float)
        if m.shape != (3, 3) or c.shape != (3,):
            raise ParameterError(f"channel needs a 3x3 matrix and a 3-vector, got {m.shape} and {c.shape}")
        m.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "translation", c)

    def apply(self, v: BlochVector) -> BlochVector:
        return BlochVector.from_array(self.matrix @ v.as_array() + self.translation)

    def apply_array(self, r: np.ndarray) -> np.ndarray:
        """Vectorised action on an array of Bloch vectors with trailing axis 3."""
        return r @ self.matrix.T + self.translation

    def is_diagonal(self) -> bool:
        return bool(np.all(self.matrix == np.diag(np.diag(self.matrix))))

    def allclose(self, other: AffineChannel, atol: float = ALGEBRA_TOL) -> bool:
        return bool(
            np.allclose(self.matrix, other.matrix, atol=atol, rtol=0)
            and np.allclose(self.translation, other.translation, atol=atol, rtol=0)
        )

    def max_image_norm(self, n_points: int = 2000) -> float:
        """Largest ``|M n + c|`` over a Fibonacci mesh of unit vectors ``n``."""
        return float(np.linalg.norm(self.apply_array(fibonacci_sphere(n_points)), axis=1).max())

    def __repr__(self):
        return f"AffineChannel(label={self.label!r}, matrix={self.matrix.tolist()}, translation={self.translation.tolist()})"


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    phi = np.pi * (1.0 + 5**0.5) * i
    rho = np.sqrt(1.0 - z * z)
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def identity() -> AffineChannel:
    return AffineChannel(np.eye(3), np.zeros(3), "id")


def amplitude_damping(gamma: float) -> AffineChannel:
    """Amplitude damping towards the ``z = +1`` pole with decay probability ``gamma``."""
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"amplitude damping gamma must lie in [0, 1], got {gamma}")
    s = np.sqrt(1.0 - gamma)
    return AffineChannel(np.diag([s, s, 1.0 - gamma]), np.array([0.0, 0.0, gamma]), f"ad({gamma:g})")


def pauli_x() -> AffineChannel:
    """Conjugation by sigma_x: a pi rotation about the x axis."""
    return AffineChannel(np.diag([1.0, -1.0, -1.0]), np.zeros(3), "x")


def compose(outer: AffineChannel, inner: AffineChannel) -> AffineChannel:
    """Channel applying ``inner`` first and then ``outer``."""
    return AffineChannel(
        outer.matrix @ inner.matrix,
        outer.matrix @ inner.translation + outer.translation,
        f"{outer.label}∘{inner.label}",
    )


def channel_from_config(spec: dict) -> AffineChannel:
    """Build a channel from ``{"kind": "ad"|"x"|"x-ad"|"ad-x"|"custom", ...}``.

    ``x-ad`` is the x flip applied after damping, ``ad-x`` the reverse order.
    Custom channels take ``matrix`` (3x3) and ``translation`` (3); they are
    accepted with a warning when sampled points leave the Bloch ball.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ParameterError(f"channel spec must be a mapping with a 'kind' key, got {spec!r}")
    kind = spec["kind"]
    if kind in ("ad", "x-ad", "ad-x"):
        if "gamma" not in spec:
            raise ParameterError(f"channel kind {kind!r} requires 'gamma'")
        ad = amplitude_damping(float(spec["gamma"]))
    if kind == "x":
        return pauli_x()
    if kind == "ad":
        return ad
    if kind == "x-ad":
        return compose(pauli_x(), ad)
    if kind == "ad-x":
        return compose(ad, pauli_x())
    if kind == "id":
        return identity()
    if kind == "custom":
        try:
            ch = AffineChannel(spec["matrix"], spec.get("translation", [0.0, 0.0, 0.0]), "custom")
        except KeyError:
            raise ParameterError("custom channel requires 'matrix'") from None
        if ch.max_image_norm() > 1.0 + BALL_TOL:
            warnings.warn("custom channel maps sampled pure states outside the Bloch ball", stacklevel=2)
        return ch
    raise ParameterError(f"unknown channel kind {kind!r}; expected ad, x, x-ad, ad-x, id or custom")
