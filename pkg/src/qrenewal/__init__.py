"""Monte Carlo and exact tools for non-Markovianity of qubit quantum renewal processes."""

__version__ = "0.1.0"

from .bloch import (
    AffineChannel,
    BlochVector,
    StatePair,
    amplitude_damping,
    compose,
    pauli_x,
    trace_distance,
)
from .dephasing import DephasingGenerator
from .ensemble import DistanceCurve, estimate_distance_curve, mean_bloch_curves, run_ensemble
from .nonmarkov import NmReport, Revival, blp_measure, detect_revivals, optimize_pair
from .trajectory import RenewalModel
from .wtd import WtdSequence, WtdSpec

__all__ = [
    "AffineChannel",
    "BlochVector",
    "DephasingGenerator",
    "DistanceCurve",
    "NmReport",
    "RenewalModel",
    "Revival",
    "StatePair",
    "WtdSequence",
    "WtdSpec",
    "amplitude_damping",
    "blp_measure",
    "compose",
    "detect_revivals",
    "estimate_distance_curve",
    "mean_bloch_curves",
    "optimize_pair",
    "pauli_x",
    "run_ensemble",
    "trace_distance",
]
