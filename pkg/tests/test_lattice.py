import numpy as np
import pytest

from manywalk.lattice import (
    LatticeConfig,
    build_even_step,
    build_evolution,
    build_odd_step,
    build_single_bs,
    is_unitary,
    position_moments,
)

S = 1 / np.sqrt(2)


def propagate_by_hand(start, L, steps):
    """Single-particle amplitudes pushed through the array pair by pair."""
    dim = 2 * L
    amps = np.zeros(dim, dtype=complex)
    amps[start - 1] = 1.0
    for step in range(1, steps + 1):
        offset = 0 if step % 2 else 1
        new = np.zeros(dim, dtype=complex)
        for first in range(offset, dim, 2):
            a, b = first % dim, (first + 1) % dim
            # an amplitude entering a BS port stays with weight 1/sqrt2 and crosses with i/sqrt2
            new[a] += S * amps[a] + 1j * S * amps[b]
            new[b] += 1j * S * amps[a] + S * amps[b]
        amps = new
    return amps


def test_single_bs_entries():
    U = build_single_bs()
    np.testing.assert_array_equal(U, np.array([[S, 1j * S], [1j * S, S]]))
    assert np.max(np.abs(U.conj().T @ U - np.eye(2))) <= 1e-15
    np.testing.assert_allclose(np.abs(U) ** 2, 0.5, atol=1e-16)


def test_odd_step_blocks():
    np.testing.assert_array_equal(build_odd_step(1), build_single_bs())
    V1 = build_odd_step(2)
    assert V1.shape == (4, 4)
    assert V1[0, 2] == 0
    np.testing.assert_array_equal(V1[2:, 2:], build_single_bs())
    assert is_unitary(build_odd_step(25))


@pytest.mark.parametrize("builder", [build_odd_step, build_even_step])
def test_steps_reject_empty_lattice(builder):
    with pytest.raises(ValueError):
        builder(0)


def test_even_step_small_lattice():
    # 2x2 cyclic shifts are both the swap; swap U swap = U since U is symmetric
    V2 = build_even_step(1)
    np.testing.assert_allclose(V2, np.array([[S, 1j * S], [1j * S, S]]), atol=1e-16)
    assert is_unitary(V2)


def test_even_step_couples_shifted_pairs():
    V2 = build_even_step(3)
    # 1-based (2,3) and (4,5) are coupled
    assert V2[1, 2] == pytest.approx(1j * S)
    assert V2[3, 4] == pytest.approx(1j * S)
    assert V2[0, 1] == 0
    # periodic closure: mode 6 couples to mode 1
    assert V2[5, 0] == pytest.approx(1j * S)
    assert is_unitary(build_even_step(25))


def test_zero_steps_is_identity():
    for L in (1, 3, 25):
        np.testing.assert_array_equal(build_evolution(LatticeConfig(L, 0)), np.eye(2 * L))


def test_one_step_single_bs():
    np.testing.assert_array_equal(build_evolution(LatticeConfig(1, 1)), build_single_bs())


@pytest.mark.parametrize("L,steps", [(2, 2), (3, 3), (4, 5), (5, 8)])
def test_evolution_matches_hand_propagation(L, steps):
    W = build_evolution(LatticeConfig(L, steps))
    for start in range(1, 2 * L + 1):
        np.testing.assert_allclose(W[start - 1], propagate_by_hand(start, L, steps), atol=1e-14)


def test_composition():
    L = 4
    V1, V2 = build_odd_step(L), build_even_step(L)
    W4 = build_evolution(LatticeConfig(L, 4))
    np.testing.assert_allclose(W4, V1 @ V2 @ V1 @ V2, atol=1e-14)
    np.testing.assert_allclose(build_evolution(LatticeConfig(L, 5)), W4 @ V1, atol=1e-14)


def test_unitarity_up_to_fifty_modes():
    for L in (1, 2, 7, 25):
        for n in (0, 1, 2, 13, 40):
            assert is_unitary(build_evolution(LatticeConfig(L, n)), atol=1e-12)


@pytest.mark.parametrize("half, steps", [(0, 1), (2, -1), (1.5, 2)])
def test_config_validation(half, steps):
    with pytest.raises(ValueError):
        LatticeConfig(half, steps)


def test_position_moments_single_bs():
    mean, var = position_moments(build_single_bs(), 1)
    assert mean == pytest.approx(1.5)
    assert var == pytest.approx(0.25)
