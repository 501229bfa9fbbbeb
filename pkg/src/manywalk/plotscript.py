"""Generate a standalone matplotlib script that plots an emitted table.

The script is plain text written next to the data file; nothing is rendered
here.
"""

from __future__ import annotations

TEMPLATE = '''\
"""Plot {data_name} (generated by manywalk {version}).

Run with:  python {script_name}
"""
import csv
import json
from pathlib import Path

import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent
DATA = HERE / {data_name!r}
FORMAT = {fmt!r}
KEYS = {keys!r}
COLUMNS = {columns!r}
LOG_SCALE = {log_scale!r}


def load():
    if FORMAT == "json":
        doc = json.loads(DATA.read_text())
        rows = [r["key"] + r["values"] for r in doc["rows"]]
        names = doc["keys"] + doc["columns"]
    else:
        lines = [l for l in DATA.read_text().splitlines() if not l.startswith("#")]
        reader = csv.reader(lines)
        names = next(reader)
        rows = [[float(x) if x else float("nan") for x in row] for row in reader]
    return {{name: [row[i] for row in rows] for i, name in enumerate(names)}}


def main():
    table = load()
    if len(KEYS) == 2:
        fig, axes = plt.subplots(1, len(COLUMNS), figsize=(4 * len(COLUMNS), 3.5), squeeze=False)
        size = int(max(table[KEYS[0]])) + 1
        for ax, name in zip(axes[0], COLUMNS):
            grid = [[float("nan")] * size for _ in range(size)]
            for a, b, p in zip(table[KEYS[0]], table[KEYS[1]], table[name]):
                grid[int(a)][int(b)] = p
            im = ax.imshow(grid, origin="lower")
            ax.set_xlabel(KEYS[1])
            ax.set_ylabel(KEYS[0])
            ax.set_title(name)
            fig.colorbar(im, ax=ax)
    else:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        x = table[KEYS[0]]
        for name in COLUMNS:
            ax.plot(x, table[name], marker="o" if "boson" in name else "s", label=name)
        if LOG_SCALE:
            ax.set_yscale("log")
        ax.set_xlabel(KEYS[0])
        ax.set_ylabel("probability" if COLUMNS[0].startswith("P_") else "mean occupation")
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(HERE / {figure_name!r})


if __name__ == "__main__":
    main()
'''


def plot_script(scenario, data_name: str, key_names, columns) -> str:
    from . import __version__

    stem = data_name.rsplit(".", 1)[0]
    return TEMPLATE.format(
        version=__version__,
        data_name=data_name,
        script_name=f"{stem}.plot.py",
        figure_name=f"{stem}.png",
        fmt=scenario.fmt,
        keys=list(key_names),
        columns=list(columns),
        log_scale=scenario.key_kind == "k",
    )
