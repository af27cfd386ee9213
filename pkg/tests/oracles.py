"""Independent density-matrix implementations used as test oracles.

Everything here works on 2x2 density matrices with Kraus operators and a
matrix exponential of the Lindblad superoperator, so it shares no code
path with the Bloch-vector implementation under test.
"""

import numpy as np
from scipy.linalg import expm

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)


def rho_from_bloch(r):
    x, y, z = r
    return 0.5 * (I2 + x * SX + y * SY + z * SZ)


def bloch_from_rho(rho):
    return np.array([np.trace(rho @ s).real for s in PAULIS])


def ad_kraus(gamma):
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return [k0, k1]


def x_kraus():
    return [SX]


def apply_kraus(kraus, rho):
    return sum(k @ rho @ k.conj().T for k in kraus)


def kraus_compose(outer, inner):
    return [a @ b for a in outer for b in inner]


def lindblad_superop(gammas):
    """Superoperator of rho -> sum_k gamma_k/2 (s_k rho s_k - rho), row-major vec."""
    L = np.zeros((4, 4), dtype=complex)
    for g, s in zip(gammas, PAULIS):
        L += 0.5 * g * (np.kron(s, s.conj()) - np.eye(4))
    return L


def lindblad_evolve(gammas, rho, t):
    vec = expm(lindblad_superop(gammas) * t) @ rho.reshape(-1)
    return vec.reshape(2, 2)


def trace_norm_distance(rho, sigma):
    return 0.5 * np.abs(np.linalg.eigvalsh(rho - sigma)).sum()


def trajectory_rho(r0, jump_times, gammas, kraus, t):
    """State at time ``t`` of a single trajectory, jumps at times <= t applied."""
    rho = rho_from_bloch(r0)
    last = 0.0
    for tj in jump_times:
        if tj > t:
            break
        rho = apply_kraus(kraus, lindblad_evolve(gammas, rho, tj - last))
        last = tj
    return lindblad_evolve(gammas, rho, t - last)
