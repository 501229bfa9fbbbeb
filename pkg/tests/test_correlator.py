import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_occupations, random_unitary
from manywalk.correlator import (
    coherent_sum_kernel,
    general_correlator,
    mean_occupation,
    naive_coherent_sum,
    naive_permanent,
    ryser_permanent,
    ryser_permanents,
    two_mode_correlator,
)
from manywalk.lattice import LatticeConfig, build_evolution, build_single_bs
from manywalk.oracle import expand_final_state, oracle_correlator

U = build_single_bs()


def test_ryser_small_known_values():
    assert ryser_permanent(np.array([[1, 2], [3, 4]])) == pytest.approx(10)
    assert ryser_permanent(np.ones((4, 4))) == pytest.approx(24)
    assert ryser_permanents(np.zeros((3, 0, 0))).tolist() == [1, 1, 1]


@pytest.mark.parametrize("n", range(1, 7))
def test_ryser_matches_naive_permanent(rng, n):
    for _ in range(5):
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        assert abs(ryser_permanent(A) - naive_permanent(A)) <= 1e-12 * max(1, abs(naive_permanent(A)))


def test_ryser_batch_equals_single(rng):
    mats = rng.normal(size=(7, 5, 5)) + 1j * rng.normal(size=(7, 5, 5))
    batch = ryser_permanents(mats)
    for A, p in zip(mats, batch):
        assert abs(p - ryser_permanent(A)) <= 1e-13


@pytest.mark.parametrize("species", ["boson", "fermion"])
@pytest.mark.parametrize("m", range(1, 7))
def test_kernel_matches_naive_coherent_sum(rng, species, m):
    W = random_unitary(rng, 7)
    for _ in range(4):
        if species == "fermion":
            q = tuple(sorted(rng.choice(np.arange(1, 8), size=m, replace=False)))
        else:
            q = tuple(sorted(rng.integers(1, 8, size=m)))
        outs = tuple(rng.integers(1, 8, size=m))
        fast = coherent_sum_kernel(q, outs, W, species)
        slow = naive_coherent_sum(q, outs, W, species)
        assert abs(fast - slow) <= 1e-12


def test_kernel_all_outputs_equal():
    rng = np.random.default_rng(1)
    W = random_unitary(rng, 5)
    q, i = (1, 2, 4), 3
    expected = 6 * W[0, 2] * W[1, 2] * W[3, 2]
    assert abs(coherent_sum_kernel(q, (i, i, i), W, "boson") - expected) < 1e-14


def test_kernel_two_particle_exchange(rng):
    W = random_unitary(rng, 4)
    k, l, i, j = 1, 3, 2, 4
    direct, exchange = W[k - 1, i - 1] * W[l - 1, j - 1], W[k - 1, j - 1] * W[l - 1, i - 1]
    assert abs(coherent_sum_kernel((k, l), (i, j), W, "boson") - (direct + exchange)) < 1e-15
    assert abs(coherent_sum_kernel((k, l), (i, j), W, "fermion") - (direct - exchange)) < 1e-15


def test_mean_occupation_examples():
    assert mean_occupation(U, (1, 0), 1) == pytest.approx(0.5, abs=1e-15)
    assert mean_occupation(U, (1, 1), 2) == pytest.approx(1.0, abs=1e-15)
    r = (3, 0, 2, 1)
    for i in range(1, 5):
        assert mean_occupation(np.eye(4), r, i) == r[i - 1]
    with pytest.raises(IndexError):
        mean_occupation(U, (1, 0), 3)


def test_hom_two_mode():
    assert two_mode_correlator(U, (1, 1), "boson", 1, 2) == pytest.approx(0.0, abs=1e-15)
    assert two_mode_correlator(U, (1, 1), "fermion", 1, 2) == pytest.approx(1.0, abs=1e-15)
    assert two_mode_correlator(np.eye(2), (1, 1), "boson", 1, 2) == 1.0
    with pytest.raises(ValueError):
        two_mode_correlator(U, (1, 1), "boson", 1, 1)


def test_identity_same_mode_moment():
    assert general_correlator(np.eye(2), (2, 0), "boson", (1, 1)).value == pytest.approx(2.0)


def test_general_reproduces_mean(rng):
    for _ in range(100):
        d = int(rng.integers(2, 7))
        W = random_unitary(rng, d)
        r = random_occupations(rng, int(rng.integers(1, 5)), d, "boson")
        i = int(rng.integers(1, d + 1))
        for species in ("boson", "fermion"):
            if species == "fermion" and max(r) > 1:
                continue
            got = general_correlator(W, r, species, (i,)).value
            assert abs(got - mean_occupation(W, r, i)) <= 1e-12


def test_general_reproduces_two_mode(rng):
    for _ in range(100):
        d = int(rng.integers(2, 7))
        W = random_unitary(rng, d)
        species = "fermion" if rng.random() < 0.5 else "boson"
        N = int(rng.integers(2, d + 1))
        r = random_occupations(rng, N, d, species)
        i, j = (int(x) for x in rng.choice(np.arange(1, d + 1), size=2, replace=False))
        got = general_correlator(W, r, species, (i, j)).value
        assert abs(got - two_mode_correlator(W, r, species, i, j)) <= 1e-12


def test_matches_oracle_small(rng):
    for _ in range(10):
        W = build_evolution(LatticeConfig(2, int(rng.integers(0, 5))))
        for species in ("boson", "fermion"):
            r = random_occupations(rng, 3, 4, species)
            exp = expand_final_state(W, r, species)
            for m in range(1, 4):
                for outs in itertools.combinations_with_replacement(range(1, 5), m):
                    got = general_correlator(W, r, species, outs).value
                    assert abs(got - oracle_correlator(exp, outs)) <= 1e-10


def test_output_order_invariance(rng):
    W = random_unitary(rng, 5)
    for species, r in (("boson", (2, 1, 0, 1, 1)), ("fermion", (1, 1, 0, 1, 1))):
        outs = (1, 4, 2, 5)
        ref = general_correlator(W, r, species, outs).value
        for perm in itertools.permutations(outs):
            assert abs(general_correlator(W, r, species, perm).value - ref) <= 1e-12


def test_number_conservation_and_species_degeneracy(rng):
    W = random_unitary(rng, 6)
    r = (1, 0, 1, 1, 0, 1)
    means_b = [mean_occupation(W, r, i) for i in range(1, 7)]
    means_f = [general_correlator(W, r, "fermion", (i,)).value for i in range(1, 7)]
    assert abs(sum(means_b) - 4) <= 1e-10
    np.testing.assert_allclose(means_b, means_f, atol=1e-12)


@pytest.mark.parametrize("N", range(1, 6))
def test_identity_sum_rule(N):
    r = (0, N, 0)
    for m in range(1, N + 1):
        expected = np.prod(range(N - m + 1, N + 1))
        assert general_correlator(np.eye(3), r, "boson", (2,) * m).value == pytest.approx(expected)


def test_pauli_repeated_outputs_exactly_zero(rng):
    W = random_unitary(rng, 5)
    res = general_correlator(W, (1, 1, 1, 0, 1), "fermion", (2, 2, 3))
    assert res.value == 0.0


def test_errors():
    with pytest.raises(ValueError):
        general_correlator(U, (1, 0), "boson", (1, 2))
    with pytest.raises(ValueError, match="Pauli"):
        general_correlator(U, (2, 0), "fermion", (1,))
    with pytest.raises(ValueError):
        general_correlator(U, (1, 1), "distinguishable", (1,))


def test_term_count_and_workers_determinism():
    W = build_evolution(LatticeConfig(5, 7))
    r = (0, 2, 1, 1, 1, 1, 2, 0, 0, 0)
    outs = (3, 3, 4, 5, 6)
    serial = general_correlator(W, r, "boson", outs, chunk_size=7)
    threaded = general_correlator(W, r, "boson", outs, workers=4, chunk_size=7)
    assert serial.value == threaded.value  # bitwise
    assert serial.term_count == threaded.term_count > 7


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_non_negative(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 6))
    W = random_unitary(rng, d)
    r = random_occupations(rng, int(rng.integers(1, 5)), d, "boson")
    m = int(rng.integers(1, sum(r) + 1))
    outs = tuple(rng.integers(1, d + 1, size=m))
    assert general_correlator(W, r, "boson", outs).value >= 0.0
