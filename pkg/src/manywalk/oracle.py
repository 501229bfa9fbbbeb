"""Brute-force Fock-space expansion of the evolved product state.

Every particle's creation operator is replaced by ``sum_q W[src, q] a_q^+``
and the product is multiplied out over all ``(2L)^N`` output assignments.
Bosonic terms collect a ``sqrt(prod n_q!)`` ladder factor; fermionic terms
collect the sign needed to bring the created modes into ascending order,
which is the reference ordering of fermionic basis states. Intended for
validation only, hence the hard size caps.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Sequence

import numpy as np

from .combinatorics import Species, check_occupations, roster
from .counting import CountingDistribution
from .errors import CapExceededError

__all__ = ["FockExpansion", "expand_final_state", "oracle_correlator", "oracle_counting",
           "MAX_ORACLE_PARTICLES", "MAX_ORACLE_MODES"]

MAX_ORACLE_PARTICLES = 6
MAX_ORACLE_MODES = 8


@dataclass(frozen=True)
class FockExpansion:
    """Amplitudes on occupation basis vectors (rows of ``basis``)."""

    basis: np.ndarray
    amplitudes: np.ndarray
    species: Species

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(self.probabilities.sum())


def _inversion_parity(assign: np.ndarray) -> np.ndarray:
    N = assign.shape[1]
    inv = np.zeros(assign.shape[0], dtype=np.int64)
    for a in range(N):
        for b in range(a + 1, N):
            inv += assign[:, a] > assign[:, b]
    return np.where(inv % 2, -1.0, 1.0)


def expand_final_state(W, r: Sequence[int], species) -> FockExpansion:
    species = Species.parse(species)
    if species is Species.DISTINGUISHABLE:
        raise ValueError("the Fock oracle treats indistinguishable particles only")
    W = np.asarray(W, dtype=complex)
    occ = check_occupations(r, species)
    n_modes, N = W.shape[0], sum(occ)
    if len(occ) != n_modes:
        raise ValueError(f"{len(occ)} occupations for a {n_modes}-mode evolution")
    if N > MAX_ORACLE_PARTICLES or n_modes > MAX_ORACLE_MODES:
        raise CapExceededError(
            f"Fock oracle is limited to N <= {MAX_ORACLE_PARTICLES} and 2L <= {MAX_ORACLE_MODES}; "
            f"got N={N}, 2L={n_modes}"
        )
    if N == 0:
        return FockExpansion(np.zeros((1, n_modes), dtype=np.int64), np.ones(1, dtype=complex), species)

    starts = np.asarray(roster(occ)) - 1
    # every assignment of an output mode to each particle, in lexicographic order
    assign = np.indices((n_modes,) * N).reshape(N, -1).T
    terms = np.prod(W[starts[None, :], assign], axis=1)

    keep = terms != 0
    assign, terms = assign[keep], terms[keep]
    occupations = np.zeros((assign.shape[0], n_modes), dtype=np.int64)
    for p in range(N):
        occupations[np.arange(assign.shape[0]), assign[:, p]] += 1

    if species is Species.FERMION:
        ok = occupations.max(axis=1) <= 1
        terms = terms * _inversion_parity(assign)
        terms, occupations = terms[ok], occupations[ok]

    keys = occupations @ ((N + 1) ** np.arange(n_modes, dtype=np.int64))
    uniq, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    amps = (np.bincount(inverse, weights=terms.real, minlength=uniq.size)
            + 1j * np.bincount(inverse, weights=terms.imag, minlength=uniq.size))
    basis = occupations[first]

    if species is Species.BOSON:
        ladder = np.array([np.prod([factorial(int(x)) for x in row]) for row in basis], dtype=float)
        norm_in = float(np.prod([factorial(x) for x in occ]))
        amps = amps * np.sqrt(ladder / norm_in)
    return FockExpansion(basis, amps, species)


def oracle_correlator(exp: FockExpansion, outs: Sequence[int]) -> float:
    """Normally ordered correlator evaluated diagonally in the number basis."""
    weights = exp.probabilities.copy()
    counts: dict[int, int] = {}
    for o in outs:
        counts[o] = counts.get(o, 0) + 1
    for mode, c in counts.items():
        n = exp.basis[:, mode - 1]
        falling = np.ones(n.shape, dtype=float)
        for t in range(c):
            falling *= np.clip(n - t, 0, None)
        weights = weights * falling
    return float(weights.sum())


def oracle_counting(exp: FockExpansion, modes: Sequence[int]) -> CountingDistribution:
    """Marginal counting distribution read directly off the expansion."""
    modes = list(modes)
    if not 1 <= len(modes) <= 2:
        raise ValueError("watch one or two modes")
    N = int(exp.basis[0].sum())
    P = np.zeros((N + 1,) * len(modes))
    idx = tuple(exp.basis[:, m - 1] for m in modes)
    np.add.at(P, idx, exp.probabilities)
    return CountingDistribution(P, abs(float(P.sum()) - 1.0))
