import math
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singletsim import (
    DEFAULT_SEED,
    HalfInteger,
    Spin,
    StepKind,
    build_chain,
    exact_correlation,
    exact_joint,
    exact_marginal,
    outcome_support,
    parse_spin,
    simulate_trials,
    unit_direction,
    verify_recursion_identity,
)
from singletsim.enumeration import enumeration_size
from singletsim.randomness import dot


def closed_form(spin: Spin, c) -> Fraction:
    return -Fraction(spin.twice * (spin.twice + 2), 12) * Fraction(c)


def test_exact_marginal_examples():
    table = exact_marginal(build_chain(parse_spin("3/2")))
    assert all(p == Fraction(1, 4) for p in table.entries.values())
    table = exact_marginal(build_chain(Spin(4)))
    assert all(p == Fraction(1, 5) for p in table.entries.values())
    # s = 1: Prob(alpha = 0) equals Prob(f = -1) = 1/3
    table = exact_marginal(build_chain(Spin(2)))
    assert table.probability(HalfInteger(0)) == Fraction(1, 3)


@pytest.mark.parametrize("twice", range(1, 41))
def test_exact_marginal_uniform_everywhere(twice):
    spin = Spin(twice)
    table = exact_marginal(build_chain(spin))
    assert table.support() == outcome_support(spin)
    assert all(p == Fraction(1, spin.dimension) for p in table.entries.values())


def test_exact_joint_spin_half_perfect_anticorrelation():
    joint = exact_joint(build_chain(Spin(1)), Fraction(1))
    up, down = HalfInteger(1), HalfInteger(-1)
    assert joint.probability(up, down) == Fraction(1, 2)
    assert joint.probability(down, up) == Fraction(1, 2)
    assert joint.probability(up, up) == 0
    assert joint.probability(down, down) == 0


def test_exact_joint_spin_half_independence_at_zero():
    joint = exact_joint(build_chain(Spin(1)), Fraction(0))
    assert all(p == Fraction(1, 4) for p in joint.entries.values())


def test_exact_joint_spin_one_correlation():
    assert exact_correlation(build_chain(Spin(2)), Fraction(1)) == Fraction(-2, 3)


def test_exact_joint_marginals_and_symmetry():
    for text in ("1", "3/2", "5/2", "3"):
        spin = parse_spin(text)
        chain = build_chain(spin)
        joint = exact_joint(chain, Fraction(1, 3))
        assert joint.marginal_alpha().entries == exact_marginal(chain).entries
        assert joint.marginal_beta().entries == exact_marginal(chain).entries
        for (alpha, beta), p in joint.entries.items():
            assert joint.probability(-alpha, -beta) == p


def test_exact_correlation_examples():
    assert exact_correlation(build_chain(Spin(1)), Fraction(1)) == Fraction(-1, 4)
    assert exact_correlation(build_chain(Spin(6)), Fraction(-1)) == Fraction(4)
    assert abs(exact_correlation(build_chain(Spin(4)), 0.3) - (-0.6)) <= 1e-10


@given(
    twice=st.integers(min_value=1, max_value=15),
    c=st.fractions(min_value=-1, max_value=1),
)
@settings(max_examples=60, deadline=None)
def test_exact_correlation_rational_inputs_are_exact(twice, c):
    spin = Spin(twice)
    assert exact_correlation(build_chain(spin), c) == closed_form(spin, c)


@pytest.mark.parametrize("twice", range(1, 16))
def test_exact_correlation_linear_in_cos(twice):
    spin = Spin(twice)
    chain = build_chain(spin)
    rng = np.random.default_rng(twice)
    for c in rng.uniform(-1.0, 1.0, size=50):
        got = exact_correlation(chain, float(c))
        assert abs(got - float(closed_form(spin, Fraction(float(c))))) <= 1e-10


def test_exact_joint_rejects_bad_cos():
    with pytest.raises(ValueError):
        exact_joint(build_chain(Spin(1)), 1.5)


def test_enumeration_stays_small_and_fast():
    assert enumeration_size(Spin(30)) <= 4096  # s = 15
    started = time.perf_counter()
    exact_joint(build_chain(Spin(30)), 0.37)
    assert time.perf_counter() - started < 1.0


def test_monte_carlo_matches_exact_joint_cellwise():
    spin = Spin(2)
    chain = build_chain(spin)
    a = unit_direction(0.3, -0.5, 0.81, tol=1.0)
    b = unit_direction(-0.4, 0.9, 0.17, tol=1.0)
    joint = exact_joint(chain, dot(a, b))
    arrays = simulate_trials(chain, a, b, 1_000_000, seed=DEFAULT_SEED)
    n = len(arrays)
    d = spin.dimension
    support = outcome_support(spin)
    ia = (spin.twice - arrays.alpha2.astype(np.int64)) >> 1
    ib = (spin.twice - arrays.beta2.astype(np.int64)) >> 1
    counts = np.bincount(ia * d + ib, minlength=d * d).reshape(d, d)
    for i, alpha in enumerate(support):
        for j, beta in enumerate(support):
            p = float(joint.probability(alpha, beta))
            freq = counts[i, j] / n
            band = 5.0 * math.sqrt(max(p * (1 - p), 1e-12) / n)
            assert abs(freq - p) <= band, (alpha, beta, freq, p)


def test_recursion_identity_examples():
    checks = {c.dimension: c for c in verify_recursion_identity(40)}
    assert checks[4].lhs == Fraction(15, 12)
    assert checks[3].lhs == Fraction(8, 12)
    assert checks[7].lhs == Fraction(48, 12)
    assert checks[4].kind is StepKind.HALF_INTEGER
    assert checks[7].kind is StepKind.INTEGER


def test_recursion_identity_all_dimensions():
    checks = verify_recursion_identity(40)
    assert [c.dimension for c in checks] == list(range(2, 42))
    assert all(c.passed for c in checks)
    assert all(c.rhs == Fraction(c.dimension ** 2 - 1, 12) for c in checks)
