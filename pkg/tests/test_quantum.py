import math

import numpy as np
import pytest

from singletsim import (
    Direction,
    HalfInteger,
    Spin,
    build_singlet,
    build_spin_operators,
    parse_spin,
    quantum_correlation,
    quantum_joint,
    rotation_operator,
    unit_direction,
)
from singletsim.randomness import dot


def random_direction(rng) -> Direction:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return Direction(*v)


def closed_form(spin: Spin, c: float) -> float:
    return -spin.twice * (spin.twice + 2) / 12.0 * c


def test_operators_spin_half_are_half_paulis():
    ops = build_spin_operators(parse_spin("1/2"))
    assert np.allclose(ops.jz, np.diag([0.5, -0.5]))
    assert np.allclose(ops.jx, np.array([[0, 0.5], [0.5, 0]]))
    assert np.allclose(ops.jy, np.array([[0, -0.5j], [0.5j, 0]]))


def test_operators_spin_one_jz():
    ops = build_spin_operators(Spin(2))
    assert np.allclose(ops.jz, np.diag([1.0, 0.0, -1.0]))


def test_operators_spin_three_halves_ladder_element():
    # <3/2| Jx |1/2> = sqrt(s(s+1) - m(m+1))/2 at m = 1/2, i.e. sqrt(3)/2
    ops = build_spin_operators(parse_spin("3/2"))
    assert ops.jx[0, 1] == pytest.approx(math.sqrt(3) / 2, abs=1e-15)


@pytest.mark.parametrize("twice", range(1, 13))
def test_commutators_and_casimir(twice):
    spin = Spin(twice)
    ops = build_spin_operators(spin)
    i = 1j
    assert np.max(np.abs(ops.jx @ ops.jy - ops.jy @ ops.jx - i * ops.jz)) <= 1e-10
    assert np.max(np.abs(ops.jy @ ops.jz - ops.jz @ ops.jy - i * ops.jx)) <= 1e-10
    assert np.max(np.abs(ops.jz @ ops.jx - ops.jx @ ops.jz - i * ops.jy)) <= 1e-10
    casimir = ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
    s = spin.twice / 2.0
    assert np.max(np.abs(casimir - s * (s + 1) * np.eye(spin.dimension))) <= 1e-10
    for op in (ops.jx, ops.jy, ops.jz):
        assert abs(np.trace(op)) <= 1e-12
        assert np.max(np.abs(op - op.conj().T)) <= 1e-12


@pytest.mark.parametrize("twice", [1, 2, 5, 8])
def test_eigenvalue_grid_for_random_directions(twice):
    spin = Spin(twice)
    ops = build_spin_operators(spin)
    grid = np.arange(-spin.twice, spin.twice + 1, 2) / 2.0
    rng = np.random.default_rng(twice)
    for _ in range(100):
        a = random_direction(rng)
        vals = np.linalg.eigvalsh(ops.along(a))
        assert np.max(np.abs(vals - grid)) <= 1e-9


def test_singlet_spin_half_is_qubit_singlet():
    psi = build_singlet(Spin(1)).as_matrix()
    expected = np.array([[0.0, 1.0], [-1.0, 0.0]]) / math.sqrt(2)
    assert np.allclose(psi, expected, atol=1e-15)


def test_singlet_spin_one_amplitudes():
    psi = build_singlet(Spin(2)).as_matrix()
    # amplitude (-1)^(1-m)/sqrt(3) at (m, -m) with basis order m = 1, 0, -1
    norm = 1 / math.sqrt(3)
    assert psi[0, 2] == pytest.approx(norm)
    assert psi[1, 1] == pytest.approx(-norm)
    assert psi[2, 0] == pytest.approx(norm)
    assert build_singlet(Spin(2)).amplitudes[2] == pytest.approx(norm)


@pytest.mark.parametrize("twice", range(1, 13))
def test_singlet_normalized_and_annihilated(twice):
    spin = Spin(twice)
    state = build_singlet(spin)
    assert abs(np.vdot(state.amplitudes, state.amplitudes).real - 1.0) <= 1e-12
    # leading amplitude (m = s paired with -s) is real positive
    assert state.as_matrix()[0, spin.dimension - 1].real > 0
    ops = build_spin_operators(spin)
    eye = np.eye(spin.dimension)
    psi = state.amplitudes
    for op in (ops.jx, ops.jy, ops.jz):
        total = np.kron(op, eye) + np.kron(eye, op)
        assert np.linalg.norm(total @ psi) <= 1e-10


def test_quantum_correlation_examples():
    z = Direction(0.0, 0.0, 1.0)
    x = Direction(1.0, 0.0, 0.0)
    assert quantum_correlation(parse_spin("1/2"), z, z) == pytest.approx(-0.25, abs=1e-12)
    assert quantum_correlation(parse_spin("5/2"), z, x) == pytest.approx(0.0, abs=1e-12)
    half = unit_direction(math.sqrt(3) / 2, 0.0, 0.5)  # a.b = 1/2 against z
    assert quantum_correlation(Spin(6), z, half) == pytest.approx(-2.0, abs=1e-9)


@pytest.mark.parametrize("twice", range(1, 13))
def test_quantum_correlation_closed_form(twice):
    spin = Spin(twice)
    rng = np.random.default_rng(100 + twice)
    for _ in range(50):
        a, b = random_direction(rng), random_direction(rng)
        got = quantum_correlation(spin, a, b)
        assert abs(got - closed_form(spin, dot(a, b))) <= 1e-9


def test_quantum_joint_spin_half_equal_directions():
    joint = quantum_joint(Spin(1), Direction(0.0, 0.0, 1.0), Direction(0.0, 0.0, 1.0))
    up, down = HalfInteger(1), HalfInteger(-1)
    assert joint.probability(up, down) == pytest.approx(0.5, abs=1e-12)
    assert joint.probability(down, up) == pytest.approx(0.5, abs=1e-12)
    assert joint.probability(up, up) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("twice", [1, 2, 3, 4, 6])
def test_quantum_joint_consistency(twice):
    spin = Spin(twice)
    rng = np.random.default_rng(200 + twice)
    a, b = random_direction(rng), random_direction(rng)
    joint = quantum_joint(spin, a, b)
    total = math.fsum(float(p) for p in joint.entries.values())
    assert abs(total - 1.0) <= 1e-10
    uniform = 1.0 / spin.dimension
    for table in (joint.marginal_alpha(), joint.marginal_beta()):
        assert max(abs(float(p) - uniform) for p in table.entries.values()) <= 1e-10
    assert abs(joint.correlation() - quantum_correlation(spin, a, b)) <= 1e-9
    # orthogonal directions decorrelate
    c = random_direction(rng)
    c_perp = np.cross(a.as_array(), c.as_array())
    c_perp /= np.linalg.norm(c_perp)
    perp_joint = quantum_joint(spin, a, Direction(*c_perp))
    assert abs(perp_joint.correlation()) <= 1e-9


def test_quantum_joint_spin_one_cross_checked_by_rotation():
    # Independent route: rotate the z-basis projectors onto a with the spin-1
    # rotation operator, instead of eigendecomposing a.J directly.
    spin = Spin(2)
    rng = np.random.default_rng(5)
    a = random_direction(rng)
    joint = quantum_joint(spin, a, a)
    axis = np.cross([0.0, 0.0, 1.0], a.as_array())
    axis /= np.linalg.norm(axis)
    angle = math.acos(a.z)
    rot = rotation_operator(spin, Direction(*axis), angle)
    assert np.max(np.abs(rot @ rot.conj().T - np.eye(3))) <= 1e-12
    psi = build_singlet(spin).as_matrix()
    amp = rot.conj().T @ psi @ rot.conj()
    prob = np.abs(amp) ** 2
    support = [HalfInteger(t) for t in (2, 0, -2)]
    for i, alpha in enumerate(support):
        for j, beta in enumerate(support):
            assert float(joint.probability(alpha, beta)) == pytest.approx(
                prob[i, j], abs=1e-9
            )
    assert float(joint.probability(HalfInteger(0), HalfInteger(0))) == pytest.approx(
        1.0 / 3.0, abs=1e-9
    )
