"""Outcome probability tables and their CSV/JSON export.

Tables hold either exact Fractions (enumeration with rational inputs) or
floats; probabilities must be non-negative and sum to 1 (exactly when
rational, within a tolerance otherwise).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from .spins import HalfInteger

_SUM_TOL = 1e-12


def _is_exact(value) -> bool:
    return isinstance(value, Rational)


def _check_probabilities(values, tol: float) -> None:
    if any((v < 0 for v in values)):
        raise ValueError("probabilities must be non-negative")
    if all(_is_exact(v) for v in values):
        total = sum(values, Fraction(0))
        if total != 1:
            raise ValueError(f"rational probabilities must sum to exactly 1, got {total}")
    else:
        total = math.fsum(float(v) for v in values)
        if abs(total - 1.0) > tol:
            raise ValueError(f"probabilities sum to {total!r}, more than {tol} from 1")


@dataclass(frozen=True)
class DistributionTable:
    """Probability table over outcome values."""

    entries: dict[HalfInteger, Fraction | float]
    sum_tol: float = field(default=_SUM_TOL, compare=False)

    def __post_init__(self):
        _check_probabilities(self.entries.values(), self.sum_tol)

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(v) for v in self.entries.values())

    def support(self) -> tuple[HalfInteger, ...]:
        return tuple(sorted(self.entries, key=lambda h: -h.twice))

    def probability(self, value: HalfInteger):
        return self.entries.get(value, Fraction(0) if self.is_exact else 0.0)

    def as_floats(self) -> dict[HalfInteger, float]:
        return {k: float(v) for k, v in self.entries.items()}

    def max_abs_diff(self, other: "DistributionTable") -> float:
        keys = set(self.entries) | set(other.entries)
        return max(abs(float(self.probability(k)) - float(other.probability(k))) for k in keys)

    def to_rows(self) -> list[tuple]:
        return [(v.to_json(), float(self.entries[v])) for v in self.support()]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("alpha,probability\n")
        for value, prob in self.to_rows():
            out.write(f"{value},{prob!r}\n")
        return out.getvalue()

    def to_json_obj(self) -> list[dict]:
        return [{"alpha": value, "probability": prob} for value, prob in self.to_rows()]


@dataclass(frozen=True)
class JointDistribution:
    """Probability table over (alpha, beta) outcome pairs at a fixed a.b."""

    entries: dict[tuple[HalfInteger, HalfInteger], Fraction | float]
    cos_ab: Fraction | float
    sum_tol: float = field(default=_SUM_TOL, compare=False)

    def __post_init__(self):
        _check_probabilities(self.entries.values(), self.sum_tol)

    @property
    def is_exact(self) -> bool:
        return all(_is_exact(v) for v in self.entries.values())

    def probability(self, alpha: HalfInteger, beta: HalfInteger):
        return self.entries.get((alpha, beta), Fraction(0) if self.is_exact else 0.0)

    def support(self) -> tuple[tuple[HalfInteger, HalfInteger], ...]:
        return tuple(sorted(self.entries, key=lambda ab: (-ab[0].twice, -ab[1].twice)))

    def marginal_alpha(self) -> DistributionTable:
        out: dict[HalfInteger, Fraction | float] = {}
        for (alpha, _), p in self.entries.items():
            out[alpha] = out.get(alpha, Fraction(0) if _is_exact(p) else 0.0) + p
        return DistributionTable(out, sum_tol=self.sum_tol)

    def marginal_beta(self) -> DistributionTable:
        out: dict[HalfInteger, Fraction | float] = {}
        for (_, beta), p in self.entries.items():
            out[beta] = out.get(beta, Fraction(0) if _is_exact(p) else 0.0) + p
        return DistributionTable(out, sum_tol=self.sum_tol)

    def correlation(self):
        """Sum of alpha*beta*P; exact when the table is exact."""
        if self.is_exact:
            return sum(
                (a.fraction * b.fraction * p for (a, b), p in self.entries.items()),
                Fraction(0),
            )
        return math.fsum(
            (a.twice * b.twice * float(p)) / 4.0 for (a, b), p in self.entries.items()
        )

    def total_variation(self, other: "JointDistribution") -> float:
        keys = set(self.entries) | set(other.entries)
        return 0.5 * math.fsum(
            abs(float(self.probability(*k)) - float(other.probability(*k))) for k in keys
        )

    def to_rows(self) -> list[tuple]:
        return [
            (a.to_json(), b.to_json(), float(self.entries[(a, b)])) for a, b in self.support()
        ]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("alpha,beta,probability\n")
        for alpha, beta, prob in self.to_rows():
            out.write(f"{alpha},{beta},{prob!r}\n")
        return out.getvalue()

    def to_json_obj(self) -> list[dict]:
        return [
            {"alpha": alpha, "beta": beta, "probability": prob}
            for alpha, beta, prob in self.to_rows()
        ]
