"""Normally ordered particle-number correlators for bosons and fermions.

The central quantity is

    < a+_{i1} ... a+_{im} a_{i1} ... a_{im} >
        = sum_q  prod_l r_l!/(r_l - mu_l)!  |  sum_sigma f(sigma) prod_j W[sigma_j, i_j] |^2

where ``q`` runs over source multisets (see :mod:`manywalk.combinatorics`)
and the inner coherent sum over distinct orderings of ``q`` is evaluated as
a permanent (bosons, via Ryser's formula) or a determinant (fermions).
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .combinatorics import (
    Species,
    check_occupations,
    enumerate_sources,
    factorial,
    multiplicities,
    multiplicity_prefactor,
)

__all__ = [
    "CorrelatorResult",
    "mean_occupation",
    "two_mode_correlator",
    "general_correlator",
    "coherent_sum_kernel",
    "naive_coherent_sum",
    "ryser_permanent",
    "ryser_permanents",
    "naive_permanent",
]

CHUNK = 2048
_SUBSET_BLOCK = 1 << 14


@dataclass(frozen=True)
class CorrelatorResult:
    value: float
    term_count: int


def _check_mode(mode, n_modes):
    if int(mode) != mode or not 1 <= mode <= n_modes:
        raise IndexError(f"mode {mode} outside 1..{n_modes}")
    return int(mode)


def _indistinguishable(species) -> Species:
    species = Species.parse(species)
    if species is Species.DISTINGUISHABLE:
        raise ValueError(
            "correlators here are for indistinguishable particles; "
            "use manywalk.distinguishable for the classical baseline"
        )
    return species


# -- permanents ---------------------------------------------------------------


@lru_cache(maxsize=64)
def _subset_masks(n: int, start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
    codes = np.arange(start, stop, dtype=np.int64)
    masks = ((codes[:, None] >> np.arange(n)) & 1).astype(float)
    signs = (-1.0) ** (n - masks.sum(axis=1))
    masks.flags.writeable = False
    signs.flags.writeable = False
    return masks.T.copy(), signs


def ryser_permanents(mats: np.ndarray) -> np.ndarray:
    """Permanents of a stack of square matrices, shape ``(B, n, n)``.

    Ryser's inclusion-exclusion formula
    ``perm A = (-1)^n sum_S (-1)^|S| prod_i sum_{j in S} A_ij``,
    vectorized over the batch and over blocks of column subsets.
    """
    mats = np.asarray(mats, dtype=complex)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise ValueError(f"expected a stack of square matrices, got shape {mats.shape}")
    B, n, _ = mats.shape
    if n == 0:
        return np.ones(B, dtype=complex)
    total = np.zeros(B, dtype=complex)
    for start in range(1, 1 << n, _SUBSET_BLOCK):
        stop = min(start + _SUBSET_BLOCK, 1 << n)
        masks_t, signs = _subset_masks(n, start, stop)
        rowsums = mats @ masks_t  # (B, n, subsets)
        total += np.prod(rowsums, axis=1) @ signs
    return total


def ryser_permanent(A) -> complex:
    A = np.asarray(A, dtype=complex)
    return complex(ryser_permanents(A[None])[0])


def naive_permanent(A) -> complex:
    """Permanent by summing all ``n!`` permutation products."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    rows = np.arange(n)
    return complex(sum(np.prod(A[rows, list(p)]) for p in itertools.permutations(range(n))))


# -- coherent sum -------------------------------------------------------------


def _permutation_sign(seq) -> int:
    inversions = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return -1 if inversions % 2 else 1


def naive_coherent_sum(q: Sequence[int], outs: Sequence[int], W, species) -> complex:
    """Direct sum over the distinct orderings of ``q``.

    Reference implementation for :func:`coherent_sum_kernel`; cost grows
    like ``m!``.
    """
    species = _indistinguishable(species)
    W = np.asarray(W)
    cols = [o - 1 for o in outs]
    base = tuple(q)
    total = 0j
    for sigma in sorted(set(itertools.permutations(base))):
        f = 1
        if species is Species.FERMION:
            # sign of the permutation of positions taking q to sigma;
            # only meaningful for distinct entries
            f = _permutation_sign([base.index(s) for s in sigma])
        total += f * np.prod([W[s - 1, c] for s, c in zip(sigma, cols)])
    return complex(total)


def _coherent_sums(rows: np.ndarray, cols: np.ndarray, W: np.ndarray, species: Species,
                   repeat_norm: np.ndarray) -> np.ndarray:
    # rows: (B, m) 0-based source indices; cols: (m,) 0-based outputs
    mats = W[rows[:, :, None], cols[None, None, :]]
    if species is Species.FERMION:
        return np.linalg.det(mats)
    return ryser_permanents(mats) / repeat_norm


def coherent_sum_kernel(q: Sequence[int], outs: Sequence[int], W, species) -> complex:
    """Coherent sum over distinct orderings of ``q`` for detection in ``outs``.

    Bosons: permanent of the ``m x m`` matrix ``W[q_a, outs_b]`` divided by
    ``prod_l mu_l!`` (the full permanent counts each distinct ordering once
    per permutation of identical rows). Fermions: its determinant.
    """
    species = _indistinguishable(species)
    if len(q) != len(outs):
        raise ValueError("source and output tuples must have equal length")
    W = np.asarray(W, dtype=complex)
    rows = np.asarray([[s - 1 for s in q]], dtype=np.intp)
    cols = np.asarray([o - 1 for o in outs], dtype=np.intp)
    norm = 1
    for mu in multiplicities(q).values():
        norm *= factorial(mu)
    return complex(_coherent_sums(rows, cols, W, species, np.array([float(norm)]))[0])


# -- correlators --------------------------------------------------------------


def mean_occupation(W, r: Sequence[int], i: int) -> float:
    """Mean particle number in output mode ``i``; the same for every species."""
    W = np.asarray(W)
    i = _check_mode(i, W.shape[0])
    occ = np.asarray(check_occupations(r), dtype=float)
    return float(np.abs(W[:, i - 1]) ** 2 @ occ)


def two_mode_correlator(W, r: Sequence[int], species, i: int, j: int) -> float:
    """``<n_i n_j>`` for distinct modes, with the exchange term.

    Pairs of distinct source modes contribute ``|W_ki W_lj +- W_kj W_li|^2``
    (``+`` bosons, ``-`` fermions); a doubly drawn source contributes
    ``|W_ki W_kj|^2 r_k (r_k - 1)``.
    """
    species = _indistinguishable(species)
    W = np.asarray(W, dtype=complex)
    i = _check_mode(i, W.shape[0])
    j = _check_mode(j, W.shape[0])
    if i == j:
        raise ValueError("two_mode_correlator needs distinct modes; use general_correlator")
    occ = np.asarray(check_occupations(r, species), dtype=float)
    a, b = W[:, i - 1], W[:, j - 1]
    sign = 1.0 if species is Species.BOSON else -1.0
    X = np.outer(a, b) + sign * np.outer(b, a)
    weights = np.triu(np.outer(occ, occ), k=1)
    value = float(np.sum(np.abs(X) ** 2 * weights))
    value += float(np.sum(np.abs(a * b) ** 2 * occ * (occ - 1)))
    return value


def _chunks(it: Iterable, size: int):
    it = iter(it)
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield block


def _block_arrays(block, r):
    rows = np.asarray(block, dtype=np.intp) - 1
    pref = np.empty(len(block))
    norm = np.empty(len(block))
    for b, q in enumerate(block):
        pref[b] = multiplicity_prefactor(r, q)
        n = 1
        for mu in multiplicities(q).values():
            n *= factorial(mu)
        norm[b] = n
    for a in (rows, pref, norm):
        a.flags.writeable = False
    return rows, pref, norm


# source tables that fit in one chunk are small enough to keep around
_BLOCK_CACHE: dict = {}
_BLOCK_CACHE_SIZE = 1024


def _source_blocks(r, m, chunk_size):
    key = (r, m, chunk_size)
    cached = _BLOCK_CACHE.get(key)
    if cached is not None:
        yield cached
        return
    produced = []
    for block in _chunks(enumerate_sources(r, m), chunk_size):
        arrays = _block_arrays(block, r)
        if len(produced) < 2:
            produced.append(arrays)
        yield arrays
    if len(produced) == 1:
        if len(_BLOCK_CACHE) >= _BLOCK_CACHE_SIZE:
            _BLOCK_CACHE.clear()
        _BLOCK_CACHE[key] = produced[0]


def _chunk_sum(arrays, cols, W, species) -> float:
    rows, pref, norm = arrays
    amps = _coherent_sums(rows, cols, W, species, norm)
    return float(np.sum(pref * np.abs(amps) ** 2))


def general_correlator(W, r: Sequence[int], species, outs: Sequence[int],
                       workers: int = 1, chunk_size: int = CHUNK) -> CorrelatorResult:
    """Evaluate the ``m``-mode normally ordered correlator for ``outs``.

    Repeated entries of ``outs`` encode powers of a single mode. The
    incoherent sum over source multisets is split into fixed-size chunks;
    with ``workers > 1`` chunks are evaluated on a thread pool, and the
    chunk sums are always reduced in enumeration order, so the result does
    not depend on ``workers``.
    """
    species = _indistinguishable(species)
    W = np.asarray(W, dtype=complex)
    occ = check_occupations(r, species)
    if len(occ) != W.shape[0]:
        raise ValueError(f"{len(occ)} occupations for a {W.shape[0]}-mode evolution")
    outs = sorted(_check_mode(o, W.shape[0]) for o in outs)
    m, N = len(outs), sum(occ)
    if m > N:
        raise ValueError(f"cannot correlate m={m} modes with only N={N} particles")
    if m == 0:
        return CorrelatorResult(1.0, 0)
    if species is Species.FERMION and len(set(outs)) < m:
        return CorrelatorResult(0.0, 0)

    cols = np.asarray(outs, dtype=np.intp) - 1
    blocks = _source_blocks(occ, m, chunk_size)
    if workers > 1:
        blocks = list(blocks)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sums = list(pool.map(lambda arrays: _chunk_sum(arrays, cols, W, species), blocks))
        count = sum(len(arrays[1]) for arrays in blocks)
    else:
        sums, count = [], 0
        for arrays in blocks:
            sums.append(_chunk_sum(arrays, cols, W, species))
            count += len(arrays[1])
    value = 0.0
    for s in sums:
        value += s
    return CorrelatorResult(max(value, 0.0) if value > -1e-12 else value, count)
