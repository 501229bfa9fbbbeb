"""Scenario files: flat ``key = value`` text, validated with every problem reported.

Recognised keys::

    preset       name of a built-in scenario to start from
    lattice      L, the number of beam splitters per row (2L modes)
    steps        one or more step counts, comma separated
    occupations  ``central-block:N`` or an explicit comma list; several
                 alternatives separated by ``;``
    species      boson, fermion, distinguishable (comma list or repeated)
    observable   mean-profile | single-mode-statistics i |
                 two-mode-statistics i j | conditional m i j | pair-averaged m
                 (repeatable; ``m`` may be ``N`` for the total particle number)
    engine       main | oracle
    format       csv | json
    out          output path
    plot-script  yes | no
    weighting    uniform | probability (pair averages only)

Keys given later override earlier ones: preset, then config file, then
command-line flags.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .combinatorics import MAX_PARTICLES, Species, central_block

__all__ = [
    "ConfigError",
    "Observable",
    "Occupation",
    "Scenario",
    "PRESETS",
    "parse_entries",
    "validate_config",
    "validate_entries",
]

KEYS = ("preset", "lattice", "steps", "occupations", "species", "observable", "engine",
        "format", "out", "plot-script", "weighting")
REPEATABLE = ("species", "observable")

KEY_KIND = {
    "mean-profile": "mode",
    "single-mode-statistics": "k",
    "two-mode-statistics": "k_i,k_j",
    "conditional": "dk",
    "pair-averaged": "dk",
}
ARITY = {"mean-profile": 0, "single-mode-statistics": 1, "two-mode-statistics": 2,
         "conditional": 3, "pair-averaged": 1}


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


@dataclass(frozen=True)
class Occupation:
    label: str
    vector: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.vector)


@dataclass(frozen=True)
class Observable:
    kind: str
    modes: tuple[int, ...] = ()
    m: Optional[int] = None  # None with kind conditional/pair-averaged means "N"

    @property
    def key_kind(self) -> str:
        return KEY_KIND[self.kind]

    def order(self, occ: Occupation) -> int:
        return occ.total if self.m is None else self.m

    @property
    def label(self) -> str:
        m = "mN" if self.m is None else f"m{self.m}"
        if self.kind == "single-mode-statistics":
            return f"i{self.modes[0]}"
        if self.kind == "two-mode-statistics":
            return f"i{self.modes[0]}j{self.modes[1]}"
        if self.kind == "conditional":
            return f"{m}_i{self.modes[0]}j{self.modes[1]}"
        if self.kind == "pair-averaged":
            return m
        return "mean"

    def describe(self) -> str:
        parts = [self.kind]
        if self.kind in ("conditional", "pair-averaged"):
            parts.append("N" if self.m is None else str(self.m))
        parts.extend(str(x) for x in self.modes)
        return " ".join(parts)


@dataclass(frozen=True)
class Scenario:
    half_modes: int
    steps: tuple[int, ...]
    occupations: tuple[Occupation, ...]
    species: tuple[Species, ...]
    observables: tuple[Observable, ...]
    engine: str = "main"
    fmt: str = "csv"
    out: Optional[str] = None
    plot_script: bool = False
    weighting: str = "uniform"
    preset: Optional[str] = None

    @property
    def modes(self) -> int:
        return 2 * self.half_modes

    @property
    def key_kind(self) -> str:
        return self.observables[0].key_kind

    def resolved(self) -> dict[str, str]:
        """Fully resolved configuration, as written into output headers."""
        return {
            "preset": self.preset or "",
            "lattice": str(self.half_modes),
            "modes": str(self.modes),
            "steps": ",".join(map(str, self.steps)),
            "occupations": "; ".join(
                f"{o.label}=" + ",".join(map(str, o.vector)) for o in self.occupations),
            "species": ",".join(s.value for s in self.species),
            "observable": "; ".join(o.describe() for o in self.observables),
            "engine": self.engine,
            "weighting": self.weighting,
        }


PRESETS = {
    "fig2": """
        lattice = 25
        steps = 6
        occupations = central-block:8
        species = boson, distinguishable
        observable = single-mode-statistics 25
    """,
    "fig3a": """
        lattice = 25
        steps = 20
        occupations = central-block:8
        species = boson, distinguishable
        observable = conditional 4 19 32
        observable = conditional 8 19 32
    """,
    "fig3b": """
        lattice = 25
        steps = 20
        occupations = central-block:8
        species = boson, distinguishable
        observable = conditional 4 18 32
        observable = conditional 8 18 32
    """,
    "fig3c": """
        lattice = 25
        steps = 20
        occupations = central-block:4; central-block:6; central-block:8
        species = boson
        observable = conditional N 19 32
    """,
    "fig4": """
        lattice = 25
        steps = 19, 20
        occupations = central-block:8
        species = boson, distinguishable
        observable = pair-averaged 4
        observable = pair-averaged N
    """,
}


def parse_entries(raw: str, origin: str = "line") -> tuple[list[tuple[str, str, str]], list[str]]:
    """Split ``key = value`` text into ``(key, value, where)`` triples."""
    entries, errors = [], []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        where = f"{origin} {lineno}"
        if "=" not in text:
            errors.append(f"{where}: expected 'key = value', got {text!r}")
            continue
        key, value = (s.strip() for s in text.split("=", 1))
        key = key.lower().replace("_", "-")
        if key not in KEYS:
            errors.append(f"{where}: unknown key {key!r}")
            continue
        entries.append((key, value, where))
    return entries, errors


def _int(value, where, what, errors, minimum=None):
    try:
        x = int(value)
    except (TypeError, ValueError):
        errors.append(f"{where}: {what} must be an integer, got {value!r}")
        return None
    if minimum is not None and x < minimum:
        errors.append(f"{where}: {what} must be >= {minimum}, got {x}")
        return None
    return x


def _occupation(text, n_modes, where, errors):
    text = text.strip()
    if text.lower().startswith("central-block"):
        _, _, count = text.partition(":")
        N = _int(count.strip(), where, "central-block particle number", errors, minimum=0)
        if N is None or n_modes is None:
            return None
        if N > n_modes:
            errors.append(f"{where}: central-block:{N} does not fit on {n_modes} modes")
            return None
        return Occupation(f"N{N}", central_block(N, n_modes))
    vector = []
    for pos, item in enumerate(text.split(","), start=1):
        x = _int(item.strip(), where, f"occupation of mode {pos}", errors, minimum=0)
        if x is None:
            return None
        vector.append(x)
    if n_modes is not None and len(vector) != n_modes:
        errors.append(f"{where}: {len(vector)} occupations given for a lattice of {n_modes} modes")
        return None
    return Occupation("r" + "-".join(map(str, vector)) if len(vector) <= 8 else "explicit", tuple(vector))


def _observable(text, where, errors):
    tokens = text.split()
    if not tokens:
        errors.append(f"{where}: empty observable")
        return None
    kind = tokens[0].lower()
    if kind not in KEY_KIND:
        errors.append(f"{where}: unknown observable {kind!r} (expected one of {', '.join(KEY_KIND)})")
        return None
    args = tokens[1:]
    if len(args) != ARITY[kind]:
        errors.append(f"{where}: {kind} takes {ARITY[kind]} argument(s), got {len(args)}")
        return None
    m = None
    if kind in ("conditional", "pair-averaged"):
        if args[0].upper() != "N":
            m = _int(args[0], where, "conditioning total m", errors, minimum=0)
            if m is None:
                return None
        args = args[1:]
    modes = []
    for a in args:
        x = _int(a, where, "mode", errors, minimum=1)
        if x is None:
            return None
        modes.append(x)
    if len(modes) == 2 and modes[0] == modes[1]:
        errors.append(f"{where}: {kind} needs two distinct modes, got {modes[0]} twice")
        return None
    return Observable(kind, tuple(modes), m)


def validate_entries(entries, errors=None) -> Scenario:
    """Build a :class:`Scenario` from ``(key, value, where)`` triples."""
    errors = list(errors or [])
    # later sources replace earlier ones key by key; repeats within one source accumulate
    merged: dict[str, list[tuple[str, str]]] = {}
    source_of: dict[str, str] = {}
    for key, value, where in entries:
        source = where.rsplit(" ", 1)[0] if where.split(" ")[-1].isdigit() else where
        if key in merged and source_of[key] != source:
            merged[key] = []
        elif key in merged and key not in REPEATABLE:
            errors.append(f"{where}: duplicate key {key!r} (first given at {merged[key][0][1]})")
            continue
        merged.setdefault(key, []).append((value, where))
        source_of[key] = source

    def one(key):
        vals = merged.get(key)
        return vals[0] if vals else (None, None)

    preset = one("preset")[0]

    value, where = one("lattice")
    half = None
    if value is None:
        errors.append("missing required key 'lattice'")
    else:
        half = _int(value, where, "lattice L", errors, minimum=1)
    n_modes = 2 * half if half else None

    steps = []
    value, where = one("steps")
    if value is None:
        errors.append("missing required key 'steps'")
    else:
        for item in value.split(","):
            x = _int(item.strip(), where, "steps", errors, minimum=0)
            if x is not None:
                steps.append(x)

    species = []
    for value, where in merged.get("species", []):
        for item in value.split(","):
            try:
                s = Species.parse(item)
            except ValueError as exc:
                errors.append(f"{where}: {exc}")
                continue
            if s not in species:
                species.append(s)
    if not merged.get("species"):
        errors.append("missing required key 'species'")

    occupations = []
    value, where = one("occupations")
    if value is None:
        errors.append("missing required key 'occupations'")
    else:
        for part in value.split(";"):
            occ = _occupation(part, n_modes, where, errors)
            if occ is None:
                continue
            if occ.total == 0:
                errors.append(f"{where}: occupation {occ.label} holds no particles")
                continue
            if occ.total > MAX_PARTICLES:
                errors.append(f"{where}: {occ.total} particles exceed the cap of {MAX_PARTICLES}")
            if Species.FERMION in species:
                for mode, x in enumerate(occ.vector, start=1):
                    if x > 1:
                        errors.append(f"{where}: Pauli violation at mode {mode} "
                                      f"(occupation {x} with fermion species)")
            occupations.append(occ)

    observables = []
    for value, where in merged.get("observable", []):
        obs = _observable(value, where, errors)
        if obs is None:
            continue
        if n_modes is not None:
            for mode in obs.modes:
                if mode > n_modes:
                    errors.append(f"{where}: mode {mode} outside 1..{n_modes}")
        for occ in occupations:
            if obs.m is not None and obs.m > occ.total:
                errors.append(f"{where}: m={obs.m} exceeds the particle number N={occ.total} "
                              f"of occupation {occ.label}")
        if obs.kind == "pair-averaged" and n_modes is not None and n_modes < 2:
            errors.append(f"{where}: pair averages need at least two modes")
        observables.append(obs)
    if not merged.get("observable"):
        errors.append("missing required key 'observable'")
    kinds = {o.key_kind for o in observables}
    if len(kinds) > 1:
        errors.append(f"observables produce incompatible tables (row keys {sorted(kinds)}); "
                      "run them as separate scenarios")

    def choice(key, options, default):
        value, where = one(key)
        if value is None:
            return default
        value = value.strip().lower()
        if value not in options:
            errors.append(f"{where}: {key} must be one of {', '.join(options)}, got {value!r}")
            return default
        return value

    engine = choice("engine", ("main", "oracle"), "main")
    fmt = choice("format", ("csv", "json"), "csv")
    weighting = choice("weighting", ("uniform", "probability"), "uniform")
    plot = choice("plot-script", ("yes", "no", "true", "false", "1", "0"), "no") in ("yes", "true", "1")
    out = one("out")[0]

    if errors:
        raise ConfigError(errors)
    return Scenario(
        half_modes=half,
        steps=tuple(steps),
        occupations=tuple(occupations),
        species=tuple(species),
        observables=tuple(observables),
        engine=engine,
        fmt=fmt,
        out=out,
        plot_script=plot,
        weighting=weighting,
        preset=preset,
    )


def preset_entries(name: str, errors: list) -> list:
    if name not in PRESETS:
        errors.append(f"unknown preset {name!r} (available: {', '.join(PRESETS)})")
        return []
    entries, errs = parse_entries(PRESETS[name], origin=f"preset {name} line")
    errors.extend(errs)
    return [("preset", name, f"preset {name}")] + entries


def validate_config(raw: str) -> Scenario:
    """Validate scenario text; raises :class:`ConfigError` listing every problem.

    A ``preset`` key pulls in the built-in scenario first; the remaining
    keys in ``raw`` override it.
    """
    entries, errors = parse_entries(raw)
    presets = [e for e in entries if e[0] == "preset"]
    base = []
    if presets:
        base = preset_entries(presets[-1][1], errors)
    return validate_entries(base + [e for e in entries if e[0] != "preset"], errors)
