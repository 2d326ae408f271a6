"""Exact protocol statistics by finite enumeration.

Per chain step, Alice's sign x and Bob's corrected sign y form a +/-1 pair
with zero means and correlation equal to a.b. For a pair of +/-1 variables
those moments determine the joint law uniquely,

    P(x, y) = (1 + x*y*(a.b)) / 4,

because P(x, y) = (1 + x<X> + y<Y> + xy<XY>)/4 holds identically for any
+/-1 pair. Steps are independent of one another and of the shared f-bits,
whose law is P(f=+1) = (1+bias)/2. Summing the output recursion over every
sign/f configuration with these weights therefore gives the exact joint law
of the protocol outcomes. The test suite validates this pair law against
Monte Carlo runs before anything else trusts the oracle.

With a rational a.b the whole computation is exact Fraction arithmetic;
with a float it falls back to floats with compensated final summation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from numbers import Rational

from .spins import BinaryChain, HalfInteger, Spin, StepKind, build_chain
from .tables import DistributionTable, JointDistribution

_PM = (1, -1)


def _accumulate2(chain: BinaryChain, signs, fbits) -> int:
    """Output recursion in twice-units for one sign/f assignment."""
    acc2 = 0
    fj = 0
    for k, step in enumerate(chain.steps):
        if step.kind is StepKind.INTEGER:
            acc2 = ((1 + fbits[fj]) // 2) * (step.coefficient.twice * signs[k] + acc2)
            fj += 1
        else:
            acc2 = step.coefficient.twice * signs[k] + acc2
    return acc2


def _f_weights(chain: BinaryChain, exact: bool):
    """Per integer step, the probability of f=+1 and f=-1."""
    weights = []
    for k in chain.integer_step_indices:
        bias = chain.steps[k].f_bias
        if exact:
            weights.append(((1 + bias) / 2, (1 - bias) / 2))
        else:
            b = float(bias)
            weights.append(((1.0 + b) / 2.0, (1.0 - b) / 2.0))
    return weights


def exact_marginal(chain: BinaryChain) -> DistributionTable:
    """Exact outcome law of one party; always the uniform law 1/(2s+1)."""
    n = chain.n_steps
    f_weights = _f_weights(chain, exact=True)
    half = Fraction(1, 2 ** n)
    probs: dict[HalfInteger, Fraction] = {}
    for signs in product(_PM, repeat=n):
        for fbits in product(_PM, repeat=len(f_weights)):
            w = half
            for f, (wp, wm) in zip(fbits, f_weights):
                w *= wp if f == 1 else wm
            alpha = HalfInteger(-_accumulate2(chain, signs, fbits))
            probs[alpha] = probs.get(alpha, Fraction(0)) + w
    return DistributionTable(probs)


def _pair_weights(cos_ab):
    """Joint law of one step's (x, y) sign pair, keyed by the product x*y."""
    if isinstance(cos_ab, Rational):
        c = Fraction(cos_ab)
        return {1: (1 + c) / 4, -1: (1 - c) / 4}
    c = float(cos_ab)
    return {1: (1.0 + c) / 4.0, -1: (1.0 - c) / 4.0}


def exact_joint(chain: BinaryChain, cos_ab) -> JointDistribution:
    """Exact joint law of (alpha, beta) at a given a.b."""
    if not -1 <= cos_ab <= 1:
        raise ValueError(f"cos_ab must lie in [-1, 1], got {cos_ab}")
    exact = isinstance(cos_ab, Rational)
    n = chain.n_steps
    pair_w = _pair_weights(cos_ab)
    f_weights = _f_weights(chain, exact=exact)
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    probs: dict[tuple[HalfInteger, HalfInteger], Fraction | float] = {}
    for xs in product(_PM, repeat=n):
        for ys in product(_PM, repeat=n):
            w_xy = one
            for x, y in zip(xs, ys):
                w_xy *= pair_w[x * y]
            for fbits in product(_PM, repeat=len(f_weights)):
                w = w_xy
                for f, (wp, wm) in zip(fbits, f_weights):
                    w *= wp if f == 1 else wm
                key = (
                    HalfInteger(-_accumulate2(chain, xs, fbits)),
                    HalfInteger(_accumulate2(chain, ys, fbits)),
                )
                probs[key] = probs.get(key, zero) + w
    return JointDistribution(probs, cos_ab=cos_ab)


def exact_correlation(chain: BinaryChain, cos_ab):
    """<alpha*beta> from the exact joint law; equals -(1/3)s(s+1) a.b."""
    return exact_joint(chain, cos_ab).correlation()


@dataclass(frozen=True)
class RecursionIdentityCheck:
    """One dimension's second-moment step identity, in exact rationals."""

    dimension: int
    kind: StepKind
    lhs: Fraction
    rhs: Fraction

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs


def verify_recursion_identity(max_twice_spin: int) -> list[RecursionIdentityCheck]:
    """Check the per-step second-moment identities for d = 2 .. 2s+1.

    Both step types must map the previous accumulator second moment
    ((d')^2 - 1)/12 to (d^2 - 1)/12; this is exactly what makes the
    protocol correlation telescope to -(1/3)s(s+1) a.b.
    """
    checks = []
    for d in range(2, max_twice_spin + 2):
        rhs = Fraction(d * d - 1, 12)
        if d % 2 == 0:
            prev = d // 2
            lhs = Fraction(d, 4) ** 2 + Fraction(prev * prev - 1, 12)
            kind = StepKind.HALF_INTEGER
        else:
            prev = (d - 1) // 2
            lhs = Fraction(d - 1, d) * (Fraction(d + 1, 4) ** 2 + Fraction(prev * prev - 1, 12))
            kind = StepKind.INTEGER
        checks.append(RecursionIdentityCheck(d, kind, lhs, rhs))
    return checks


def enumeration_size(spin: Spin) -> int:
    """Number of enumerated configurations, 4^n * 2^L."""
    chain = build_chain(spin)
    return 4 ** chain.n_steps * 2 ** chain.n_integer_steps
