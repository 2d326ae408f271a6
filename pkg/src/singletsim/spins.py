"""Exact spin arithmetic and the binary-prefix step chain.

A spin s is stored as the integer 2s and protocol outcomes as integers
2*alpha, so every value in the output recursion is exact: the step
coefficients are d/4 for an even prefix and (d+1)/4 for an odd prefix,
both multiples of 1/2.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple


@dataclass(frozen=True, order=True)
class HalfInteger:
    """A number of the form k/2, stored as the integer k."""

    twice: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    @property
    def is_whole(self) -> bool:
        return self.twice % 2 == 0

    def __float__(self) -> float:
        return self.twice / 2.0

    def __neg__(self) -> "HalfInteger":
        return HalfInteger(-self.twice)

    def __str__(self) -> str:
        if self.is_whole:
            return str(self.twice // 2)
        return f"{self.twice}/2"

    def to_json(self):
        """Integer when whole, the string "k/2" otherwise."""
        return self.twice // 2 if self.is_whole else f"{self.twice}/2"


@dataclass(frozen=True, order=True)
class Spin:
    """A spin value s >= 0, stored as the integer 2s."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, int) or self.twice < 0:
            raise ValueError(f"spin must be a non-negative (half-)integer, got 2s={self.twice!r}")

    @property
    def dimension(self) -> int:
        return self.twice + 1

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice, 2)

    def __str__(self) -> str:
        return str(HalfInteger(self.twice))


def make_spin(twice_s: int) -> Spin:
    """Spin from the integer 2s. Rejects negative input."""
    return Spin(twice_s)


_SPIN_RE = re.compile(r"^\s*(?:(\d+)|(\d+)/([12])|(\d+)\.(\d+))\s*$")


def parse_spin(text: str) -> Spin:
    """Parse "3", "3/2" or "1.5" (decimals only when the fraction is .0 or .5)."""
    m = _SPIN_RE.match(text)
    if m is None:
        raise ValueError(f"cannot parse spin {text!r}; expected forms like '3', '3/2' or '1.5'")
    if m.group(1) is not None:
        return Spin(2 * int(m.group(1)))
    if m.group(2) is not None:
        num, den = int(m.group(2)), int(m.group(3))
        return Spin(num if den == 2 else 2 * num)
    whole, frac = int(m.group(4)), m.group(5).rstrip("0")
    if frac == "":
        return Spin(2 * whole)
    if frac == "5":
        return Spin(2 * whole + 1)
    raise ValueError(f"cannot parse spin {text!r}; decimal part must be .0 or .5")


class StepKind(Enum):
    HALF_INTEGER = "half-integer"
    INTEGER = "integer"


@dataclass(frozen=True)
class ChainStep:
    """One appended bit of the binary expansion of d = 2s+1.

    An even prefix means a half-integer step (coefficient prefix/4); an odd
    prefix means an integer step (coefficient (prefix+1)/4) carrying the
    f-bias (prefix-2)/prefix. The bias stays an exact Fraction because
    values like 5/7 have no finite binary representation.
    """

    prefix_dim: int
    kind: StepKind
    coefficient: HalfInteger
    f_bias: Fraction | None = None

    @property
    def is_integer_step(self) -> bool:
        return self.kind is StepKind.INTEGER


@dataclass(frozen=True)
class BinaryChain:
    """Prefix sequence of the binary expansion of d, one step per appended bit."""

    spin: Spin
    bits: tuple[int, ...]
    steps: tuple[ChainStep, ...]

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    @property
    def integer_step_indices(self) -> tuple[int, ...]:
        return tuple(k for k, step in enumerate(self.steps) if step.is_integer_step)

    @property
    def n_integer_steps(self) -> int:
        return len(self.integer_step_indices)


def build_chain(spin: Spin) -> BinaryChain:
    """Chain of steps driving the output recursion, scanned from the top bit of d.

    The leading bit is the dimension-1 base case (output 0) and contributes no
    step, so spin 0 yields an empty chain and zero communication.
    """
    d = spin.dimension
    bits = tuple(int(b) for b in bin(d)[2:])
    steps = []
    prefix = 1
    for bit in bits[1:]:
        prefix = 2 * prefix + bit
        if prefix % 2 == 0:
            steps.append(ChainStep(prefix, StepKind.HALF_INTEGER, HalfInteger(prefix // 2)))
        else:
            steps.append(
                ChainStep(
                    prefix,
                    StepKind.INTEGER,
                    HalfInteger((prefix + 1) // 2),
                    Fraction(prefix - 2, prefix),
                )
            )
    return BinaryChain(spin=spin, bits=bits, steps=tuple(steps))


def comm_cost(spin: Spin) -> int:
    """Worst-case cbits per run: ceil(log2(s+1)), exactly bit_length(d) - 1."""
    return spin.dimension.bit_length() - 1


class RandomnessBudget(NamedTuple):
    n_lambda: int
    n_mu: int
    n_nu: int


def randomness_budget(spin: Spin) -> RandomnessBudget:
    """Counts of shared lambda/mu/nu unit vectors needed per run."""
    chain = build_chain(spin)
    n = chain.n_steps
    return RandomnessBudget(n, n, chain.n_integer_steps)


def outcome_support(spin: Spin) -> tuple[HalfInteger, ...]:
    """The 2s+1 outcome values s, s-1, ..., -s."""
    return tuple(HalfInteger(t) for t in range(spin.twice, -spin.twice - 1, -2))
