import itertools
from math import comb

import numpy as np
import pytest

from manywalk.correlator import mean_occupation
from manywalk.distinguishable import (
    joint_counting_distribution,
    single_mode_statistics,
    single_particle_distribution,
)
from manywalk.lattice import LatticeConfig, build_evolution, build_single_bs, position_moments

U = build_single_bs()


def brute_joint(starts, W, watched):
    """Enumerate every labelled outcome (one output mode per particle)."""
    N = len(starts)
    P = np.zeros((N + 1,) * len(watched))
    probs = [np.abs(W[s - 1]) ** 2 for s in starts]
    for outcome in itertools.product(range(W.shape[0]), repeat=N):
        weight = np.prod([probs[p][o] for p, o in enumerate(outcome)])
        counts = tuple(sum(1 for o in outcome if o == w - 1) for w in watched)
        P[counts] += weight
    return P


def test_single_particle():
    np.testing.assert_allclose(single_particle_distribution(U, 1), [0.5, 0.5])
    np.testing.assert_array_equal(single_particle_distribution(np.eye(3), 2), [0, 1, 0])


def test_bernoulli_and_binomial():
    W = build_evolution(LatticeConfig(3, 3))
    p = abs(W[1, 3]) ** 2
    np.testing.assert_allclose(single_mode_statistics([2], W, 4).probabilities, [1 - p, p])
    P = single_mode_statistics([2] * 5, W, 4).probabilities
    expected = [comb(5, k) * p ** k * (1 - p) ** (5 - k) for k in range(6)]
    np.testing.assert_allclose(P, expected, atol=1e-15)


def test_hom_baseline():
    P = joint_counting_distribution([1, 2], U, [1, 2]).probabilities
    np.testing.assert_allclose(P, [[0, 0, 0.25], [0, 0.5, 0], [0.25, 0, 0]], atol=1e-15)


@pytest.mark.parametrize("starts,watched", [((1, 2, 3), (2,)), ((1, 1, 4, 5), (2, 5)), ((2, 3, 3, 6), (1, 3))])
def test_brute_force_agreement(starts, watched):
    W = build_evolution(LatticeConfig(3, 4))
    got = joint_counting_distribution(starts, W, watched).probabilities
    np.testing.assert_allclose(got, brute_joint(starts, W, watched), atol=1e-14)


def test_normalization_and_mean():
    W = build_evolution(LatticeConfig(25, 6))
    starts = list(range(22, 30))
    r = [0] * 50
    for s in starts:
        r[s - 1] = 1
    dist = single_mode_statistics(starts, W, 25)
    assert abs(dist.probabilities.sum() - 1.0) <= 1e-14
    mean = np.arange(9) @ dist.probabilities
    assert abs(mean - mean_occupation(W, r, 25)) <= 1e-12


def test_errors():
    with pytest.raises(ValueError):
        joint_counting_distribution([1], U, [1, 1])
    with pytest.raises(ValueError):
        joint_counting_distribution([1], U, [1, 2, 2])


def test_two_horned_ballistic_profile():
    W = build_evolution(LatticeConfig(25, 20))
    p = single_particle_distribution(W, 25)
    left, right = p[:25].argmax() + 1, p[25:].argmax() + 26
    # peaks sit far out on either side, not at the start mode
    assert left < 15 and right > 35
    assert p[24] < p.max() / 5
    _, var = position_moments(W, 25)
    assert var == pytest.approx(p @ (np.arange(1, 51) - p @ np.arange(1, 51)) ** 2)
