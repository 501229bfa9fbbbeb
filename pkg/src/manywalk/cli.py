"""Command-line front end: run a scenario and write its data table."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .combinatorics import Species
from .correlator import mean_occupation
from .counting import (
    conditional_imbalance,
    counting_distribution,
    pair_averaged_statistics,
)
from .errors import CapExceededError, NumericalHealthError, ZeroProbabilityError
from .lattice import LatticeConfig, build_evolution
from .oracle import expand_final_state, oracle_correlator, oracle_counting
from .plotscript import plot_script
from .scenario import (
    ConfigError,
    Scenario,
    parse_entries,
    preset_entries,
    validate_entries,
)

EXIT_OK, EXIT_CONFIG, EXIT_CAP, EXIT_HEALTH = 0, 2, 3, 4


def fmt_number(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


class _Evaluator:
    """Computes one column of a table for a fixed (W, occupation, species)."""

    def __init__(self, W, occ, species, engine, weighting):
        self.W, self.occ, self.species = W, occ, species
        self.engine, self.weighting = engine, weighting
        self._expansion = None

    @property
    def oracle(self) -> bool:
        return self.engine == "oracle" and self.species is not Species.DISTINGUISHABLE

    def expansion(self):
        if self._expansion is None:
            self._expansion = expand_final_state(self.W, self.occ, self.species)
        return self._expansion

    def distribution(self, modes):
        if self.oracle:
            return oracle_counting(self.expansion(), modes)
        return counting_distribution(self.W, self.occ, self.species, modes)

    def column(self, obs):
        """Return ``({key: value}, defect)``; defect is None for non-probabilities."""
        N = sum(self.occ)
        if obs.kind == "mean-profile":
            modes = range(1, self.W.shape[0] + 1)
            if self.oracle:
                values = {(i,): oracle_correlator(self.expansion(), [i]) for i in modes}
            else:
                values = {(i,): mean_occupation(self.W, self.occ, i) for i in modes}
            return values, None
        if obs.kind == "single-mode-statistics":
            dist = self.distribution(obs.modes)
            return {(k,): float(p) for k, p in enumerate(dist.probabilities)}, dist.normalization_defect
        if obs.kind == "two-mode-statistics":
            dist = self.distribution(obs.modes)
            P = dist.probabilities
            return ({(a, b): float(P[a, b]) for a in range(N + 1) for b in range(N + 1)},
                    dist.normalization_defect)
        m = N if obs.m is None else obs.m
        if obs.kind == "conditional":
            dist = self.distribution(obs.modes)
            cond = conditional_imbalance(dist, m)
            return {(dk,): p for dk, p in cond.items()}, dist.normalization_defect
        # pair-averaged
        if self.oracle:
            avg = self._oracle_pair_average(m)
        else:
            avg = pair_averaged_statistics(self.W, self.occ, self.species, m,
                                           weighting=self.weighting)
        return {(dk,): p for dk, p in avg.items()}, abs(sum(avg.values()) - 1.0)

    def _oracle_pair_average(self, m):
        n_modes = self.W.shape[0]
        acc, weights = np.zeros(m + 1), 0.0
        for i in range(1, n_modes + 1):
            for j in range(i + 1, n_modes + 1):
                P = oracle_counting(self.expansion(), [i, j]).probabilities
                diag = np.array([P[k, m - k] for k in range(m + 1)])
                total = diag.sum()
                if not total > 0.0:
                    continue
                w = 1.0 if self.weighting == "uniform" else total
                acc += w * diag / total
                weights += w
        if weights == 0.0:
            raise ZeroProbabilityError(f"no mode pair can hold m={m} particles")
        return {2 * k - m: float(p / weights) for k, p in enumerate(acc)}


def build_table(s: Scenario):
    """Evaluate every requested column. Returns ``(key_names, columns)``.

    ``columns`` is a list of ``(name, {key: value}, defect)``.
    """
    vary_steps = len(s.steps) > 1
    vary_occ = len(s.occupations) > 1
    vary_obs = len(s.observables) > 1
    columns = []
    for n in s.steps:
        W = build_evolution(LatticeConfig(s.half_modes, n))
        for occ in s.occupations:
            for species in s.species:
                ev = _Evaluator(W, occ.vector, species, s.engine, s.weighting)
                for obs in s.observables:
                    values, defect = ev.column(obs)
                    suffix = [species.value]
                    if vary_occ:
                        suffix.append(occ.label)
                    if vary_steps:
                        suffix.append(f"n{n}")
                    if vary_obs:
                        suffix.append(obs.label)
                    base = "mean" if obs.kind == "mean-profile" else "P"
                    columns.append((f"{base}_" + "_".join(suffix), values, defect))
    key_names = s.key_kind.split(",")
    return key_names, columns


def _rows(columns):
    keys = sorted({k for _, values, _ in columns for k in values})
    for key in keys:
        yield key, [values.get(key) for _, values, _ in columns]


def render_csv(s: Scenario, key_names, columns) -> str:
    lines = [f"# manywalk {__version__}"]
    lines += [f"# {k} = {v}" for k, v in s.resolved().items()]
    header = list(key_names)
    for name, _, defect in columns:
        header.append(name)
    for name, _, defect in columns:
        if defect is not None:
            header.append("defect_" + name.split("_", 1)[1])
    lines.append(",".join(header))
    defects = [fmt_number(d) for _, _, d in columns if d is not None]
    for key, vals in _rows(columns):
        row = [str(k) for k in key] + [fmt_number(v) for v in vals] + defects
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def render_json(s: Scenario, key_names, columns) -> str:
    doc = {
        "version": __version__,
        "config": s.resolved(),
        "keys": key_names,
        "columns": [name for name, _, _ in columns],
        "normalization_defect": {name: d for name, _, d in columns if d is not None},
        "rows": [
            {"key": list(key), "values": [None if v is None else float(v) for v in vals]}
            for key, vals in _rows(columns)
        ],
    }
    return json.dumps(doc, indent=1) + "\n"


def run_scenario(s: Scenario, stdout=None) -> int:
    """Compute the scenario, write the table (and plot script), return the exit code."""
    stdout = stdout or sys.stdout
    key_names, columns = build_table(s)
    render = render_json if s.fmt == "json" else render_csv
    text = render(s, key_names, columns)
    if s.out:
        path = Path(s.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        if s.plot_script:
            script = path.with_suffix(".plot.py")
            script.write_text(plot_script(s, path.name, key_names, [c[0] for c in columns]))
    else:
        stdout.write(text)
    return EXIT_OK


def _error(kind, messages, code, stream) -> int:
    stream.write(json.dumps({"error": kind, "exit_code": code, "messages": list(messages)}) + "\n")
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="manywalk",
        description="Counting statistics of many-particle quantum walks on a beam-splitter array.",
    )
    p.add_argument("--preset", help="built-in scenario: fig2, fig3a, fig3b, fig3c, fig4")
    p.add_argument("--config", help="scenario file with key = value lines")
    p.add_argument("--lattice", help="beam splitters per row L (2L modes)")
    p.add_argument("--steps", help="number of steps n (comma list allowed)")
    p.add_argument("--occupations", help="comma list, or central-block:N")
    p.add_argument("--species", action="append", help="boson, fermion or distinguishable; repeatable")
    p.add_argument("--observable", action="append",
                   help="mean-profile | single-mode-statistics i | two-mode-statistics i j | "
                        "conditional m i j | pair-averaged m; repeatable")
    p.add_argument("--engine", help="main (default) or oracle")
    p.add_argument("--weighting", help="pair-average weighting: uniform (default) or probability")
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--format", help="csv (default) or json")
    p.add_argument("--plot-script", action="store_true",
                   help="also write a matplotlib script next to the CSV output")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    entries, errors = [], []
    if args.preset:
        entries += preset_entries(args.preset, errors)
    if args.config:
        try:
            raw = Path(args.config).read_text()
        except OSError as exc:
            return _error("config", [f"{args.config}: {exc.strerror}"], EXIT_CONFIG, stderr)
        found, errs = parse_entries(raw, origin=f"{args.config} line")
        entries += found
        errors += errs
    for key in ("lattice", "steps", "occupations", "engine", "weighting", "out", "format"):
        value = getattr(args, key)
        if value is not None:
            entries.append((key, value, f"--{key}"))
    for key in ("species", "observable"):
        for value in getattr(args, key) or []:
            entries.append((key, value, f"--{key}"))
    if args.plot_script:
        entries.append(("plot-script", "yes", "--plot-script"))
    try:
        scenario = validate_entries(entries, errors)
    except ConfigError as exc:
        return _error("config", exc.errors, EXIT_CONFIG, stderr)
    try:
        return run_scenario(scenario, stdout=stdout)
    except CapExceededError as exc:
        return _error("cap", [str(exc)], EXIT_CAP, stderr)
    except NumericalHealthError as exc:
        return _error("numerical_health", [str(exc)], EXIT_HEALTH, stderr)
    except ZeroProbabilityError as exc:
        return _error("zero_probability", [str(exc)], EXIT_HEALTH, stderr)
    except ValueError as exc:
        return _error("config", [str(exc)], EXIT_CONFIG, stderr)


if __name__ == "__main__":
    sys.exit(main())
