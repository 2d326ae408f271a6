"""One run of the communication protocol.

Alice and Bob share, per chain step, a lambda and a mu unit vector, plus a
nu unit vector for each integer step. Alice accumulates her output over the
steps and sends one correction bit per step; Bob runs the same recursion
with his own signs. The f-bits are derived locally by both parties from the
shared nu vectors, so they cost no communication.

This module is the scalar reference path; batch work goes through
singletsim.backend, which produces bit-identical outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .backend import simulate_trials  # noqa: F401  (re-export: batch API)
from .randomness import Direction, RandomStream, dot, sample_direction, sgn
from .spins import BinaryChain, HalfInteger


@dataclass(frozen=True)
class SharedRandomness:
    """The lambda/mu/nu draws for one protocol run, keyed by chain step."""

    lambdas: tuple[Direction, ...]
    mus: tuple[Direction, ...]
    nus: dict[int, Direction]  # step index -> nu, integer steps only


@dataclass(frozen=True)
class TrialOutcome:
    alpha: HalfInteger
    beta: HalfInteger
    cbits: tuple[int, ...]
    f_bits: tuple[int, ...]

    def to_json(self, trial: int | None = None) -> dict:
        rec = {} if trial is None else {"trial": trial}
        rec.update(
            alpha=self.alpha.to_json(),
            beta=self.beta.to_json(),
            cbits=list(self.cbits),
            f_bits=list(self.f_bits),
        )
        return rec


def draw_shared_randomness(chain: BinaryChain, stream: RandomStream) -> SharedRandomness:
    """Draw the shared unit vectors for one run.

    Draw order per step is lambda, mu, then nu for integer steps; the batch
    kernels consume the stream in the same order.
    """
    lambdas, mus, nus = [], [], {}
    for k, step in enumerate(chain.steps):
        lambdas.append(sample_direction(stream))
        mus.append(sample_direction(stream))
        if step.is_integer_step:
            nus[k] = sample_direction(stream)
    return SharedRandomness(tuple(lambdas), tuple(mus), nus)


def c_bit(a: Direction, lam: Direction, mu: Direction) -> int:
    """Correction bit Sgn(a.lambda) * Sgn(a.mu)."""
    return sgn(dot(a, lam)) * sgn(dot(a, mu))


def f_bit(nu: Direction, bias: float | Fraction) -> int:
    """Sgn(nu_z + bias), the shared biased bit of an integer step.

    The comparison happens in double precision (matching the compiled
    kernel); exact rational biases are only needed by the enumeration
    oracle, which never samples nu at all.
    """
    bias = float(bias)
    if not 0.0 < bias < 1.0:
        raise ValueError(f"f-bias must lie in (0, 1), got {bias}")
    return sgn(nu.z + bias)


def _accumulate(chain: BinaryChain, signs: list[int], f_bits: dict[int, int]) -> int:
    """The output recursion over chain steps, in exact twice-units."""
    acc2 = 0
    for k, step in enumerate(chain.steps):
        if step.is_integer_step:
            acc2 = ((1 + f_bits[k]) // 2) * (step.coefficient.twice * signs[k] + acc2)
        else:
            acc2 = step.coefficient.twice * signs[k] + acc2
    return acc2


def alice_output(a: Direction, chain: BinaryChain,
                 rnd: SharedRandomness) -> tuple[HalfInteger, tuple[int, ...]]:
    """Alice's outcome and her full cbit transcript.

    All n cbits are sent even when an f-bit has already zeroed the
    accumulator; the fixed-length transcript is what the worst-case cost
    statement is about.
    """
    signs = [sgn(dot(a, lam)) for lam in rnd.lambdas]
    cbits = tuple(s * sgn(dot(a, mu)) for s, mu in zip(signs, rnd.mus))
    fbits = {k: f_bit(rnd.nus[k], chain.steps[k].f_bias) for k in rnd.nus}
    return HalfInteger(-_accumulate(chain, signs, fbits)), cbits


def bob_output(b: Direction, chain: BinaryChain, rnd: SharedRandomness,
               cbits: tuple[int, ...]) -> HalfInteger:
    """Bob's outcome from his direction, the shared randomness and the transcript."""
    if len(cbits) != chain.n_steps:
        raise ValueError(f"transcript has {len(cbits)} cbits, chain needs {chain.n_steps}")
    signs = []
    for lam, mu, c in zip(rnd.lambdas, rnd.mus, cbits):
        w = Direction(lam.x + c * mu.x, lam.y + c * mu.y, lam.z + c * mu.z)
        signs.append(sgn(dot(b, w)))
    fbits = {k: f_bit(rnd.nus[k], chain.steps[k].f_bias) for k in rnd.nus}
    return HalfInteger(_accumulate(chain, signs, fbits))


def run_trial(a: Direction, b: Direction, chain: BinaryChain,
              stream: RandomStream) -> TrialOutcome:
    """One full protocol run on a fresh per-trial stream."""
    rnd = draw_shared_randomness(chain, stream)
    alpha, cbits = alice_output(a, chain, rnd)
    beta = bob_output(b, chain, rnd, cbits)
    fbits = tuple(f_bit(rnd.nus[k], chain.steps[k].f_bias) for k in sorted(rnd.nus))
    return TrialOutcome(alpha, beta, cbits, fbits)


def _check_rotation(rotation: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    rotation = np.asarray(rotation, dtype=float)
    if rotation.shape != (3, 3):
        raise ValueError("rotation must be a 3x3 matrix")
    if not np.allclose(rotation @ rotation.T, np.eye(3), atol=tol):
        raise ValueError("rotation matrix is not orthogonal")
    if abs(np.linalg.det(rotation) - 1.0) > tol:
        raise ValueError("rotation matrix must have determinant +1")
    return rotation


def run_trial_rotated(a: Direction, b: Direction, rotation: np.ndarray,
                      chain: BinaryChain, stream: RandomStream) -> TrialOutcome:
    """Protocol run with Alice's input rotated: run_trial(rotation @ a, b).

    This realizes maximally entangled states whose relating unitary induces
    a rotation of measurement directions.
    """
    rotation = _check_rotation(rotation)
    ra = rotation @ a.as_array()
    return run_trial(Direction(float(ra[0]), float(ra[1]), float(ra[2])), b, chain, stream)
