"""Factorial moments and the counting distributions recovered from them.

Single mode:  Q_m = sum_k P(k) k!/(k-m)!
Two modes:    Q_{a,b} = sum_{k,l} P(k,l) k!/(k-a)! l!/(l-b)!

Both relations are upper triangular and are inverted in closed form,

    P(k) = sum_{m >= k} (-1)^(m-k) Q_m / (k! (m-k)!),

applied along each axis for the two-mode case.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Sequence

import numpy as np

from .combinatorics import Species, check_occupations
from .correlator import general_correlator, two_mode_correlator
from .errors import NumericalHealthError, ZeroProbabilityError

__all__ = [
    "MomentTable",
    "CountingDistribution",
    "HEALTH_TOLERANCE",
    "single_mode_moments",
    "two_mode_moments",
    "forward_moments",
    "invert_single",
    "invert_two",
    "inversion_matrix",
    "counting_distribution",
    "conditional_imbalance",
    "conditional_pair",
    "pair_averaged_statistics",
    "total_variation",
]

HEALTH_TOLERANCE = 1e-6


@dataclass(frozen=True)
class MomentTable:
    """Falling-factorial moments, ``values[m]`` or ``values[m_i, m_j]`` for 0..N."""

    values: np.ndarray
    particle_total: int

    @property
    def arity(self) -> int:
        return self.values.ndim


@dataclass(frozen=True)
class CountingDistribution:
    """Probabilities over particle counts, ``probabilities[k]`` or ``[k_i, k_j]``."""

    probabilities: np.ndarray
    normalization_defect: float = field(default=0.0)

    @property
    def arity(self) -> int:
        return self.probabilities.ndim

    @property
    def particle_total(self) -> int:
        return self.probabilities.shape[0] - 1


def _falling_matrix(N: int) -> np.ndarray:
    # F[m, k] = k!/(k-m)!
    F = np.zeros((N + 1, N + 1))
    for m in range(N + 1):
        for k in range(m, N + 1):
            F[m, k] = factorial(k) / factorial(k - m)
    return F


def inversion_matrix(N: int) -> np.ndarray:
    """``A[k, m] = (-1)^(m-k) / (k! (m-k)!)`` for ``m >= k``, so that ``P = A @ Q``."""
    A = np.zeros((N + 1, N + 1))
    for k in range(N + 1):
        for m in range(k, N + 1):
            A[k, m] = (-1) ** (m - k) / (factorial(k) * factorial(m - k))
    return A


def forward_moments(dist: CountingDistribution) -> MomentTable:
    """Moments implied by a distribution (the forward map)."""
    P = np.asarray(dist.probabilities, dtype=float)
    F = _falling_matrix(P.shape[0] - 1)
    if P.ndim == 1:
        Q = F @ P
    else:
        Q = F @ P @ F.T
    return MomentTable(Q, P.shape[0] - 1)


def _health(P: np.ndarray) -> CountingDistribution:
    defect = abs(float(P.sum()) - 1.0)
    if not np.isfinite(defect) or defect > HEALTH_TOLERANCE:
        raise NumericalHealthError(f"normalization defect {defect:.3e} exceeds {HEALTH_TOLERANCE:g}")
    return CountingDistribution(np.clip(P, 0.0, None), defect)


def invert_single(moments: MomentTable) -> CountingDistribution:
    Q = np.asarray(moments.values, dtype=float)
    if Q.ndim != 1:
        raise ValueError("invert_single needs a one-mode moment table")
    return _health(inversion_matrix(Q.size - 1) @ Q)


def invert_two(moments: MomentTable) -> CountingDistribution:
    Q = np.asarray(moments.values, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise ValueError("invert_two needs a square two-mode moment table")
    A = inversion_matrix(Q.shape[0] - 1)
    return _health(A @ Q @ A.T)


def _prepare(W, r, species):
    species = Species.parse(species)
    W = np.asarray(W, dtype=complex)
    occ = check_occupations(r, species)
    if len(occ) != W.shape[0]:
        raise ValueError(f"{len(occ)} occupations for a {W.shape[0]}-mode evolution")
    return W, occ, species


def single_mode_moments(W, r: Sequence[int], species, i: int) -> MomentTable:
    W, occ, species = _prepare(W, r, species)
    N = sum(occ)
    Q = np.zeros(N + 1)
    Q[0] = 1.0
    for m in range(1, N + 1):
        Q[m] = general_correlator(W, occ, species, [i] * m).value
    return MomentTable(Q, N)


def _grid_moments(W, occ, species, i, j, cells) -> np.ndarray:
    N = sum(occ)
    Q = np.zeros((N + 1, N + 1))
    Q[0, 0] = 1.0
    for a, b in cells:
        if a + b == 0 or a + b > N:
            continue
        if a == 1 and b == 1:
            Q[a, b] = two_mode_correlator(W, occ, species, i, j)
        else:
            Q[a, b] = general_correlator(W, occ, species, [i] * a + [j] * b).value
    return Q


def two_mode_moments(W, r: Sequence[int], species, i: int, j: int) -> MomentTable:
    """Full moment grid for modes ``i != j``; cells with ``m_i + m_j > N`` are exactly 0."""
    W, occ, species = _prepare(W, r, species)
    if i == j:
        raise ValueError("two_mode_moments needs distinct modes")
    N = sum(occ)
    cells = [(a, b) for a in range(N + 1) for b in range(N + 1 - a)]
    return MomentTable(_grid_moments(W, occ, species, i, j, cells), N)


def counting_distribution(W, r: Sequence[int], species, modes: Sequence[int]) -> CountingDistribution:
    """Counting distribution in one or two modes for any species."""
    W, occ, species = _prepare(W, r, species)
    modes = list(modes)
    if species is Species.DISTINGUISHABLE:
        from .distinguishable import distinguishable_distribution

        return distinguishable_distribution(W, occ, modes)
    if len(modes) == 1:
        return invert_single(single_mode_moments(W, occ, species, modes[0]))
    if len(modes) == 2:
        return invert_two(two_mode_moments(W, occ, species, *modes))
    raise ValueError("counting statistics are provided for one or two modes")


def conditional_imbalance(dist: CountingDistribution, m: int) -> dict[int, float]:
    """Distribution of ``k_i - k_j`` given ``k_i + k_j = m``.

    Keys run over ``-m, -m+2, ..., m`` in increasing order.
    """
    P = np.asarray(dist.probabilities)
    if P.ndim != 2:
        raise ValueError("conditioning needs a two-mode distribution")
    N = P.shape[0] - 1
    if not 0 <= m <= N:
        raise ValueError(f"need 0 <= m <= N={N}, got m={m}")
    return _normalize_slice(np.array([P[k, m - k] for k in range(m + 1)]), m)


def _normalize_slice(diag: np.ndarray, m: int) -> dict[int, float]:
    diag = np.clip(diag, 0.0, None)
    total = float(diag.sum())
    if not total > 0.0:
        raise ZeroProbabilityError(f"probability of finding m={m} particles in the two modes is zero")
    # k_i = k runs up, so delta k = 2k - m runs up as well
    return {2 * k - m: float(p / total) for k, p in enumerate(diag)}


def _diagonal(W, occ, species, i, j, m) -> np.ndarray:
    """Unnormalized ``P(k, m-k)`` for ``k = 0..m``.

    Only moments with ``m_i + m_j >= m`` enter, so for ``m = N`` a single
    anti-diagonal of the moment grid suffices.
    """
    if species is Species.DISTINGUISHABLE:
        from .distinguishable import distinguishable_distribution

        P = distinguishable_distribution(W, occ, [i, j]).probabilities
        return np.array([P[k, m - k] for k in range(m + 1)])
    N = sum(occ)
    cells = [(a, b) for a in range(N + 1) for b in range(N + 1 - a) if a + b >= m]
    Q = _grid_moments(W, occ, species, i, j, cells)
    A = inversion_matrix(N)
    return np.array([A[k] @ Q @ A[m - k] for k in range(m + 1)])


def conditional_pair(W, r: Sequence[int], species, m: int, i: int, j: int) -> dict[int, float]:
    """Conditional imbalance distribution for the pair ``(i, j)`` without the full grid."""
    W, occ, species = _prepare(W, r, species)
    N = sum(occ)
    if not 0 <= m <= N:
        raise ValueError(f"need 0 <= m <= N={N}, got m={m}")
    if i == j:
        raise ValueError("conditioning needs two distinct modes")
    return _normalize_slice(_diagonal(W, occ, species, i, j, m), m)


def pair_averaged_statistics(W, r: Sequence[int], species, m: int,
                             weighting: str = "uniform") -> dict[int, float]:
    """Mean of the conditional imbalance over all mode pairs ``i < j``.

    With ``weighting="uniform"`` every pair counts once; pairs on which the
    conditioning event has probability zero are left out. With
    ``weighting="probability"`` each pair is weighted by the probability of
    its conditioning event.
    """
    if weighting not in ("uniform", "probability"):
        raise ValueError(f"unknown weighting {weighting!r}")
    W, occ, species = _prepare(W, r, species)
    N = sum(occ)
    if not 0 <= m <= N:
        raise ValueError(f"need 0 <= m <= N={N}, got m={m}")
    n_modes = W.shape[0]
    acc = np.zeros(m + 1)
    weights = 0.0
    for i in range(1, n_modes + 1):
        for j in range(i + 1, n_modes + 1):
            diag = np.clip(_diagonal(W, occ, species, i, j, m), 0.0, None)
            total = diag.sum()
            if not total > 0.0:
                continue
            w = 1.0 if weighting == "uniform" else total
            acc += w * (diag / total)
            weights += w
    if weights == 0.0:
        raise ZeroProbabilityError(f"no mode pair can hold m={m} particles")
    return {2 * k - m: float(p / weights) for k, p in enumerate(acc)}


def total_variation(p: dict[int, float], q: dict[int, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
