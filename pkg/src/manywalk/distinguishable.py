"""Counting statistics of distinguishable particles.

Each particle performs an independent single-particle walk, so the joint
count in a few watched modes is a convolution of per-particle categorical
distributions.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .combinatorics import check_occupations, roster
from .counting import CountingDistribution

__all__ = [
    "single_particle_distribution",
    "joint_counting_distribution",
    "single_mode_statistics",
    "distinguishable_distribution",
]


def single_particle_distribution(W, s: int) -> np.ndarray:
    """Output-mode probabilities ``|W[s, i]|^2`` of one particle started at mode ``s``."""
    W = np.asarray(W)
    if not 1 <= s <= W.shape[0]:
        raise IndexError(f"mode {s} outside 1..{W.shape[0]}")
    return np.abs(W[s - 1]) ** 2


def joint_counting_distribution(starts: Sequence[int], W, watched: Sequence[int]) -> CountingDistribution:
    """Exact joint distribution of particle counts in up to two watched modes.

    ``starts`` lists one start mode per particle. Returns an array indexed
    ``P[k_1]`` or ``P[k_1, k_2]`` with every axis running over ``0..N``.
    """
    watched = [int(w) for w in watched]
    if not 1 <= len(watched) <= 2:
        raise ValueError("watch one or two modes")
    if len(set(watched)) != len(watched):
        raise ValueError("watched modes must be distinct")
    W = np.asarray(W)
    for w in watched:
        if not 1 <= w <= W.shape[0]:
            raise IndexError(f"mode {w} outside 1..{W.shape[0]}")
    N = len(starts)
    P = np.zeros((N + 1,) * len(watched))
    P[(0,) * len(watched)] = 1.0
    for s in starts:
        p = single_particle_distribution(W, s)[[w - 1 for w in watched]]
        # the "elsewhere" weight is computed as a remainder so each step stays normalized
        stay = 1.0 - p.sum()
        new = stay * P
        if len(watched) == 1:
            new[1:] += p[0] * P[:-1]
        else:
            new[1:, :] += p[0] * P[:-1, :]
            new[:, 1:] += p[1] * P[:, :-1]
        P = new
    return CountingDistribution(P, normalization_defect=abs(P.sum() - 1.0))


def single_mode_statistics(starts: Sequence[int], W, i: int) -> CountingDistribution:
    """Poisson-binomial count distribution in mode ``i``."""
    return joint_counting_distribution(starts, W, [i])


def distinguishable_distribution(W, r: Sequence[int], modes: Sequence[int]) -> CountingDistribution:
    """Convenience wrapper taking an occupation vector instead of a roster."""
    return joint_counting_distribution(roster(check_occupations(r)), W, modes)
