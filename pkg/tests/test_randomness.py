import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from singletsim import (
    DEFAULT_SEED,
    Direction,
    RandomStream,
    chi_square_uniform,
    dot,
    sample_direction,
    sample_directions,
    sgn,
    split_stream,
    unit_direction,
)


def test_sgn_examples():
    assert sgn(0.0) == 1
    assert sgn(-0.3) == -1
    assert sgn(2.5) == 1
    assert sgn(-0.0) == 1  # -0.0 >= 0.0 in IEEE comparison


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), float("-inf")])
def test_sgn_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        sgn(bad)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_sgn_total_and_idempotent(x):
    s = sgn(x)
    assert s in (1, -1)
    if x >= 0:
        assert sgn(sgn(x)) == 1


def test_default_seed_constant():
    assert DEFAULT_SEED == 0x53494E474C4554  # the bytes of b"SINGLET"


def test_unit_direction_normalizes_and_rejects():
    d = unit_direction(0.0, 0.0, 1.0 + 5e-7)
    assert d.z == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        unit_direction(0.0, 0.0, 2.0)
    with pytest.raises(ValueError):
        unit_direction(1.0, 1.0, 1.0)


def test_sample_direction_unit_norm():
    stream = RandomStream(DEFAULT_SEED, 5)
    for _ in range(1000):
        d = sample_direction(stream)
        assert abs(d.norm_squared() - 1.0) <= 1e-9


def test_sample_directions_matches_scalar_draws():
    s1 = RandomStream(123, 9)
    s2 = RandomStream(123, 9)
    batch = sample_directions(s1, 300)
    singles = [sample_direction(s2) for _ in range(300)]
    for row, d in zip(batch, singles):
        assert (row[0], row[1], row[2]) == (d.x, d.y, d.z)
    assert s1.cursor == s2.cursor == 300


def test_component_means_vanish():
    # standard error of each Cartesian component is 1/sqrt(3N); 5 sigma band
    n = 1_000_000
    stream = RandomStream(DEFAULT_SEED, 1)
    batch = sample_directions(stream, n)
    bound = 5.0 / math.sqrt(3 * n)
    assert bound < 0.005
    for axis in range(3):
        assert abs(float(batch[:, axis].mean())) < bound


def test_cap_fractions_match_bias_targets():
    # Prob(z >= p) = (1 - p)/2 for uniform directions; counted at 5 sigma
    n = 1_000_000
    stream = RandomStream(DEFAULT_SEED, 2)
    z = sample_directions(stream, n)[:, 2]
    for p in (1 / 3, 3 / 5, 5 / 7):
        frac = float(np.count_nonzero(z >= p)) / n
        target = (1.0 - p) / 2.0
        se = math.sqrt(frac * (1.0 - frac) / n)
        assert abs(frac - target) <= 5.0 * se


def test_z_histogram_uniform_chi_square():
    n = 1_000_000
    stream = RandomStream(DEFAULT_SEED, 3)
    z = sample_directions(stream, n)[:, 2]
    counts, _ = np.histogram(z, bins=20, range=(-1.0, 1.0))
    assert chi_square_uniform(counts).p_value > 0.001


def test_sign_probability_half_for_fixed_direction():
    n = 1_000_000
    a = unit_direction(0.3, -0.5, 0.81, tol=1.0)
    stream = RandomStream(DEFAULT_SEED, 4)
    batch = sample_directions(stream, n)
    dots = batch @ a.as_array()
    frac = float(np.count_nonzero(dots >= 0.0)) / n
    assert abs(frac - 0.5) <= 5.0 * math.sqrt(0.25 / n)


def test_split_streams_differ_and_reproduce():
    root = RandomStream(77, 0)
    c0 = split_stream(root, 0)
    c1 = split_stream(root, 1)
    assert c0.stream != c1.stream
    assert split_stream(RandomStream(77, 0), 0).stream == c0.stream
    d0 = sample_direction(RandomStream(77, c0.stream))
    d1 = sample_direction(RandomStream(77, c1.stream))
    assert (d0.x, d0.y, d0.z) != (d1.x, d1.y, d1.z)


def test_dot_and_direction_helpers():
    a = Direction(1.0, 0.0, 0.0)
    b = Direction(0.0, 1.0, 0.0)
    assert dot(a, b) == 0.0
    assert dot(a, a) == 1.0
    assert np.array_equal(a.as_array(), np.array([1.0, 0.0, 0.0]))
