"""Report emission: delimited output plus rendered figures.

CSV/JSON is the machine contract (rationals as "p/q" strings).  When a
report lands in a file, a PNG figure is rendered next to it as a visual
companion; the figure is best effort and never asserted on.
"""
from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .core import format_rational

SWEEP_COLUMNS = (
    "seed", "n", "z", "family", "mechanism", "objective",
    "mech_cost", "opt_cost", "ratio", "bound", "within_bound",
)


def _render(value, decimal: bool = False) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (Fraction, float)):
        return format_rational(value, decimal=decimal)
    return str(value)


def sweep_rows_to_csv(rows, out, decimal: bool = False):
    writer = csv.writer(out)
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([
            row.seed, row.n, row.z, row.family, row.mechanism, row.objective,
            _render(row.mech_cost, decimal), _render(row.opt_cost, decimal),
            _render(row.ratio, decimal), _render(row.bound, decimal),
            _render(row.within_bound),
        ])


def figure_path(out_path: str) -> Path:
    return Path(out_path).with_suffix(".png")


def render_sweep_figure(rows, out_path: str) -> Optional[Path]:
    """Scatter of per-instance ratios against the guarantee, next to the CSV."""
    finite = [(i, float(r.ratio)) for i, r in enumerate(rows)
              if isinstance(r.ratio, Fraction)]
    if not finite:
        return None
    target = figure_path(out_path)
    fig, ax = plt.subplots(figsize=(7, 4))
    xs = [i for i, _ in finite]
    ys = [v for _, v in finite]
    ax.scatter(xs, ys, s=6, alpha=0.5, label="ratio")
    bounds = [float(r.bound) for r in rows if isinstance(r.bound, Fraction)]
    if bounds:
        ax.axhline(max(bounds), color="crimson", linestyle="--",
                   label=f"guarantee {max(bounds):.4g}")
    first = rows[0]
    ax.set_xlabel("instance index")
    ax.set_ylabel("approximation ratio")
    ax.set_title(f"{first.mechanism} / {first.objective} (n={first.n}, z={first.z})")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(target, dpi=150)
    plt.close(fig)
    return target


def frontier_rows_to_csv(rows: Sequence[dict], out, decimal: bool = False):
    writer = csv.writer(out)
    writer.writerow(["n", "z", "f", "attained", "exact_match"])
    for row in rows:
        writer.writerow([
            row["n"], row["z"], _render(row["f"], decimal),
            _render(row["attained"], decimal), _render(row["exact_match"]),
        ])


def render_frontier_figure(rows: Sequence[dict], out_path: str) -> Path:
    """The guarantee frontier f(n, z) per n, in the style of the curves plot."""
    target = figure_path(out_path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    by_n = {}
    for row in rows:
        by_n.setdefault(row["n"], []).append((row["z"], float(row["f"])))
    for n, points in sorted(by_n.items()):
        points.sort()
        ax.plot([z for z, _ in points], [f for _, f in points],
                marker="o", label=f"n={n}")
    ax.set_xlabel("z")
    ax.set_ylabel("f(n, z)")
    ax.set_title("utilitarian guarantee frontier")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(target, dpi=150)
    plt.close(fig)
    return target


def table_rows_to_csv(rows: Sequence[dict], columns: Sequence[str], out, decimal: bool = False):
    writer = csv.writer(out)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_render(row[c], decimal) if row[c] != "" else "" for c in columns])


def dump_json(payload, out, decimal: bool = False):
    def default(value):
        if isinstance(value, (Fraction, float)):
            return format_rational(value, decimal=decimal)
        raise TypeError(f"cannot serialize {value!r}")

    json.dump(payload, out, indent=2, default=default)
    out.write("\n")
