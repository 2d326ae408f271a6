"""Quantum-mechanical ground truth for the spin singlet correlations.

Standard angular-momentum matrices in the basis m = s, s-1, ..., -s, the
total-spin-zero state of two spin-s systems, and the joint outcome law of
measuring a.J and b.J on it. The correlation must come out as
-(1/3) s(s+1) a.b with uniform marginals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .randomness import Direction, dot
from .spins import HalfInteger, Spin
from .tables import JointDistribution


@dataclass(frozen=True)
class SpinOperators:
    """The three spin component matrices for one spin-s system (hbar = 1)."""

    spin: Spin
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    def along(self, direction: Direction) -> np.ndarray:
        return direction.x * self.jx + direction.y * self.jy + direction.z * self.jz


@dataclass(frozen=True)
class SingletState:
    """Total-spin-zero state of two spin-s systems, amplitudes indexed (m_A, m_B)."""

    spin: Spin
    amplitudes: np.ndarray  # shape (d*d,)

    def as_matrix(self) -> np.ndarray:
        d = self.spin.dimension
        return self.amplitudes.reshape(d, d)


def _m_values(spin: Spin) -> np.ndarray:
    """Magnetic quantum numbers s, s-1, ..., -s (basis order used throughout)."""
    return (spin.twice - 2.0 * np.arange(spin.dimension)) / 2.0


def build_spin_operators(spin: Spin) -> SpinOperators:
    """Ladder-operator construction of Jx, Jy, Jz."""
    d = spin.dimension
    m = _m_values(spin)
    casimir = spin.twice * (spin.twice + 2) / 4.0  # s(s+1)
    jz = np.diag(m).astype(complex)
    jplus = np.zeros((d, d), dtype=complex)
    for i in range(1, d):
        # <m+1| J+ |m> with m = m[i]
        jplus[i - 1, i] = math.sqrt(casimir - m[i] * (m[i] + 1.0))
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2.0
    jy = (jplus - jminus) / 2.0j
    return SpinOperators(spin, jx, jy, jz)


def build_singlet(spin: Spin) -> SingletState:
    """Amplitude (-1)^(s-m) / sqrt(2s+1) at (m, -m), zero elsewhere."""
    d = spin.dimension
    psi = np.zeros((d, d), dtype=complex)
    norm = 1.0 / math.sqrt(d)
    for i in range(d):
        # basis index i holds m = s - i; the partner index of -m is d-1-i
        psi[i, d - 1 - i] = (-1.0) ** i * norm
    return SingletState(spin, psi.reshape(-1))


def quantum_correlation(spin: Spin, a: Direction, b: Direction) -> float:
    """<psi| a.J (x) b.J |psi> by direct contraction."""
    ops = build_spin_operators(spin)
    psi = build_singlet(spin).as_matrix()
    value = np.vdot(psi, ops.along(a) @ psi @ ops.along(b).T)
    return float(value.real)


def _eigenbasis(operator: np.ndarray, spin: Spin, tol: float = 1e-9):
    """Eigenvectors of a spin component, columns ordered to m = s .. -s."""
    vals, vecs = np.linalg.eigh(operator)
    grid = _m_values(spin)[::-1]  # eigh sorts ascending
    if np.max(np.abs(vals - grid)) > tol:
        raise ArithmeticError(
            f"eigenvalues {vals} stray more than {tol} from the grid {grid}"
        )
    return vecs[:, ::-1]


def quantum_joint(spin: Spin, a: Direction, b: Direction) -> JointDistribution:
    """Joint outcome law P(alpha, beta) from the spectral projectors of a.J, b.J."""
    ops = build_spin_operators(spin)
    psi = build_singlet(spin).as_matrix()
    va = _eigenbasis(ops.along(a), spin)
    vb = _eigenbasis(ops.along(b), spin)
    amp = va.conj().T @ psi @ vb.conj()
    prob = np.abs(amp) ** 2
    support = [HalfInteger(t) for t in range(spin.twice, -spin.twice - 1, -2)]
    entries = {
        (alpha, beta): float(prob[i, j])
        for i, alpha in enumerate(support)
        for j, beta in enumerate(support)
    }
    return JointDistribution(entries, cos_ab=dot(a, b), sum_tol=1e-10)


def rotation_operator(spin: Spin, axis: Direction, angle: float) -> np.ndarray:
    """exp(-i * angle * axis.J), the spin-d rotation about a unit axis."""
    ops = build_spin_operators(spin)
    vals, vecs = np.linalg.eigh(ops.along(axis))
    return (vecs * np.exp(-1j * angle * vals)) @ vecs.conj().T
