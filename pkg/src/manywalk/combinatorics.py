"""Occupation vectors and enumeration of source multisets.

A source multiset is a non-decreasing tuple of (1-based) input modes from
which ``m`` detected particles may have originated. A mode ``l`` may appear
at most ``r_l`` times.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from typing import Iterator, Sequence

from .errors import CapExceededError

MAX_PARTICLES = 20

# exact integers, 20! < 2**63
FACTORIALS = tuple(math.factorial(k) for k in range(MAX_PARTICLES + 1))


class Species(enum.Enum):
    BOSON = "boson"
    FERMION = "fermion"
    DISTINGUISHABLE = "distinguishable"

    @classmethod
    def parse(cls, value) -> "Species":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown species {value!r} (expected one of {names})") from None


def factorial(k: int) -> int:
    if k < 0:
        raise ValueError(f"factorial of negative number {k}")
    if k > MAX_PARTICLES:
        raise CapExceededError(f"factorials are capped at {MAX_PARTICLES}!, asked for {k}!")
    return FACTORIALS[k]


def check_occupations(r: Sequence[int], species=Species.BOSON) -> tuple[int, ...]:
    """Validate an occupation vector and return it as a tuple of ints.

    Raises ``ValueError`` for negative entries or a Pauli violation and
    ``CapExceededError`` above :data:`MAX_PARTICLES` particles.
    """
    species = Species.parse(species)
    occ = tuple(int(x) for x in r)
    if any(int(x) != x for x in r):
        raise ValueError("occupations must be integers")
    if any(x < 0 for x in occ):
        raise ValueError("occupations must be non-negative")
    if species is Species.FERMION:
        for mode, x in enumerate(occ, start=1):
            if x > 1:
                raise ValueError(f"Pauli violation at mode {mode}: occupation {x} > 1")
    if sum(occ) > MAX_PARTICLES:
        raise CapExceededError(f"{sum(occ)} particles exceed the cap of {MAX_PARTICLES}")
    return occ


def enumerate_sources(r: Sequence[int], m: int) -> Iterator[tuple[int, ...]]:
    """Yield every non-decreasing ``m``-tuple of source modes, lexicographically.

    Tuples drawing more particles from a mode than it holds are never
    produced.

    >>> list(enumerate_sources((1, 1, 1), 2))
    [(1, 2), (1, 3), (2, 3)]
    >>> list(enumerate_sources((2, 0), 2))
    [(1, 1)]
    """
    occ = check_occupations(r)
    total = sum(occ)
    if m < 1 or m > total:
        raise ValueError(f"need 1 <= m <= N={total}, got m={m}")
    modes = [(l, c) for l, c in enumerate(occ, start=1) if c > 0]
    # capacity left in modes[pos:], for pruning
    tail = [0] * (len(modes) + 1)
    for pos in range(len(modes) - 1, -1, -1):
        tail[pos] = tail[pos + 1] + modes[pos][1]

    def rec(pos, remaining):
        if remaining == 0:
            yield ()
            return
        if tail[pos] < remaining:
            return
        mode, cap = modes[pos]
        for c in range(min(cap, remaining), -1, -1):
            head = (mode,) * c
            for rest in rec(pos + 1, remaining - c):
                yield head + rest

    yield from rec(0, m)


def multiplicities(q: Sequence[int]) -> dict[int, int]:
    return dict(Counter(q))


def multiplicity_prefactor(r: Sequence[int], q: Sequence[int]) -> int:
    """``prod_l r_l! / (r_l - mu_l)!`` where ``mu_l`` counts mode ``l`` in ``q``."""
    out = 1
    for mode, mu in multiplicities(q).items():
        if mode < 1 or mode > len(r):
            raise ValueError(f"source mode {mode} outside 1..{len(r)}")
        have = int(r[mode - 1])
        if mu > have:
            raise ValueError(f"mode {mode} holds {have} particles, cannot draw {mu}")
        out *= factorial(have) // factorial(have - mu)
    return out


def multiset_permutation_count(q: Sequence[int]) -> int:
    """Number of distinct orderings of ``q``: ``m! / prod_l mu_l!``."""
    out = factorial(len(q))
    for mu in multiplicities(q).values():
        out //= factorial(mu)
    return out


def occupations_from_modes(modes: Sequence[int], n_modes: int) -> tuple[int, ...]:
    """Occupation vector with one particle per listed (1-based) mode."""
    occ = [0] * n_modes
    for mode in modes:
        if not 1 <= mode <= n_modes:
            raise ValueError(f"mode {mode} outside 1..{n_modes}")
        occ[mode - 1] += 1
    return tuple(occ)


def central_block(n_particles: int, n_modes: int) -> tuple[int, ...]:
    """``n_particles`` singly occupied adjacent modes centred on the lattice.

    For even ``n_particles`` on ``2L`` modes these are modes
    ``L - N/2 + 1 .. L + N/2``.
    """
    if n_particles < 0 or n_particles > n_modes:
        raise ValueError(f"cannot place {n_particles} particles singly on {n_modes} modes")
    first = n_modes // 2 - n_particles // 2 + 1
    return occupations_from_modes(range(first, first + n_particles), n_modes)


def roster(r: Sequence[int]) -> tuple[int, ...]:
    """Expand occupations into one (1-based) start mode per particle."""
    return tuple(mode for mode, c in enumerate(r, start=1) for _ in range(int(c)))
