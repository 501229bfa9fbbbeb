"""Beam-splitter array evolution matrices.

Modes are labelled 1..2L in the public API and stored 0-based. Row ``k`` of
an evolution matrix is the input mode, column ``q`` the output mode, so a
creation operator on input mode ``k`` maps to ``sum_q W[k, q] a_q^dagger``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LatticeConfig",
    "build_single_bs",
    "build_odd_step",
    "build_even_step",
    "build_evolution",
    "is_unitary",
    "position_moments",
]


@dataclass(frozen=True)
class LatticeConfig:
    """Array of ``half_modes`` beam splitters per row, run for ``steps`` rows."""

    half_modes: int
    steps: int

    def __post_init__(self):
        if int(self.half_modes) != self.half_modes or self.half_modes < 1:
            raise ValueError(f"half_modes must be a positive integer, got {self.half_modes!r}")
        if int(self.steps) != self.steps or self.steps < 0:
            raise ValueError(f"steps must be a non-negative integer, got {self.steps!r}")

    @property
    def modes(self) -> int:
        return 2 * self.half_modes


def build_single_bs() -> np.ndarray:
    """Unbiased 50/50 beam splitter, ``(1/sqrt 2) [[1, i], [i, 1]]``."""
    s = 1.0 / np.sqrt(2.0)
    return np.array([[s, 1j * s], [1j * s, s]], dtype=complex)


def _check_half_modes(L):
    if int(L) != L or L < 1:
        raise ValueError(f"need at least one beam splitter per row, got L={L!r}")


def build_odd_step(L: int) -> np.ndarray:
    """Direct sum of ``L`` beam splitters coupling modes (1,2), (3,4), ..."""
    _check_half_modes(L)
    return np.kron(np.eye(L), build_single_bs())


def _shift(L: int, sign: int) -> np.ndarray:
    # S[i, j] = 1 iff (i - j - sign) mod 2L == 0
    dim = 2 * L
    idx = np.arange(dim)
    S = np.zeros((dim, dim))
    S[idx, (idx - sign) % dim] = 1.0
    return S


def build_even_step(L: int) -> np.ndarray:
    """Beam splitters coupling modes (2,3), (4,5), ..., (2L,1).

    Obtained by conjugating the odd step with cyclic shifts, so the lattice
    is periodic.
    """
    _check_half_modes(L)
    return _shift(L, -1) @ build_odd_step(L) @ _shift(L, +1)


def build_evolution(cfg: LatticeConfig) -> np.ndarray:
    """Transition amplitudes ``W(n)`` after ``cfg.steps`` rows of the array.

    The first row applied is the odd step. Powers are formed by repeated
    multiplication so results are reproducible bit for bit.
    """
    V1 = build_odd_step(cfg.half_modes)
    V2 = build_even_step(cfg.half_modes)
    pair = V1 @ V2
    W = np.eye(cfg.modes, dtype=complex)
    for _ in range(cfg.steps // 2):
        W = W @ pair
    if cfg.steps % 2:
        W = W @ V1
    return W


def is_unitary(W: np.ndarray, atol: float = 1e-12) -> bool:
    W = np.asarray(W)
    return bool(np.max(np.abs(W.conj().T @ W - np.eye(W.shape[0]))) < atol)


def position_moments(W: np.ndarray, start: int) -> tuple[float, float]:
    """Mean and variance of the output mode of one particle injected at ``start``."""
    p = np.abs(np.asarray(W)[start - 1]) ** 2
    x = np.arange(1, p.size + 1)
    mean = float(p @ x)
    return mean, float(p @ (x - mean) ** 2)
