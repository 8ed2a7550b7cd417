"""Figure rendering from experiment CSV files.

Three figure kinds, all pure functions of the CSV contents: mean model
error vs sample size per method (log-scale y, error bars = standard
error over runs), mean wall time vs problem size per method, and strip
plots of estimated vectors.  Styling is pinned and no timestamps or
environment-dependent metadata are written, so re-rendering the same
CSV yields a byte-identical image.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

EXPERIMENT_HEADER = ["method", "m", "run", "model_error", "wall_time_ms",
                     "inner_iters_mean", "rho_selected", "alpha_selected"]
VECTOR_HEADER = ["method", "index", "value"]

KINDS = ("error_vs_m", "time_vs_n", "vector_strip")

# pinned style: deterministic colors and ordering, no rc dependence
_COLORS = {"lasso": "#d62728", "grid_c": "#1f77b4", "tree_c": "#2ca02c"}
_FALLBACK_COLORS = ["#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]


class SchemaError(ValueError):
    """The CSV does not match the expected header or is empty."""


@dataclass
class FigureSpec:
    csv_path: str
    kind: str
    out_path: str
    group_keys: tuple = ("method",)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; "
                              f"expected one of {', '.join(KINDS)}")


def _read_rows(path, header):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != header:
            raise SchemaError(
                f"unexpected CSV header {reader.fieldnames}; expected {header}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path} contains no data rows")
    return rows


def _series(rows, y_field):
    """Per method: sorted x values with mean and standard error of y."""
    out = {}
    for method in sorted({r["method"] for r in rows}):
        xs = sorted({int(r["m"]) for r in rows if r["method"] == method})
        means, stderrs = [], []
        for x in xs:
            ys = np.array([float(r[y_field]) for r in rows
                           if r["method"] == method and int(r["m"]) == x])
            means.append(float(np.mean(ys)))
            stderrs.append(float(np.std(ys) / np.sqrt(len(ys))))
        out[method] = (xs, means, stderrs)
    return out


def _color(method, i):
    return _COLORS.get(method, _FALLBACK_COLORS[i % len(_FALLBACK_COLORS)])


def _new_axes():
    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=100)
    ax.grid(True, which="both", alpha=0.3, linewidth=0.5)
    return fig, ax


def _save(fig, out_path):
    # strip the default Software tag so the bytes depend only on the data
    fig.savefig(out_path, format="png", metadata={"Software": None})
    plt.close(fig)


def _render_error_vs_m(rows, out_path):
    fig, ax = _new_axes()
    for i, (method, (xs, means, errs)) in enumerate(_series(rows, "model_error").items()):
        ax.errorbar(xs, means, yerr=errs, label=method, color=_color(method, i),
                    marker="o", markersize=4, capsize=3, linewidth=1.5)
    ax.set_xlabel("sample size m")
    ax.set_ylabel("model error")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    _save(fig, out_path)


def _render_time_vs_n(rows, out_path):
    fig, ax = _new_axes()
    for i, (method, (xs, means, errs)) in enumerate(_series(rows, "wall_time_ms").items()):
        ax.errorbar(xs, means, yerr=errs, label=method, color=_color(method, i),
                    marker="s", markersize=4, capsize=3, linewidth=1.5)
    ax.set_xlabel("problem size n")
    ax.set_ylabel("wall time (ms)")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    _save(fig, out_path)


def _render_vector_strip(rows, out_path):
    methods = sorted({r["method"] for r in rows})
    fig, axes = plt.subplots(len(methods), 1, figsize=(6.0, 1.6 * len(methods)),
                             dpi=100, squeeze=False)
    for i, method in enumerate(methods):
        ax = axes[i, 0]
        pairs = sorted((int(r["index"]), float(r["value"]))
                       for r in rows if r["method"] == method)
        idx = [p[0] for p in pairs]
        val = [p[1] for p in pairs]
        ax.plot(idx, val, color=_color(method, i), linewidth=1.0)
        ax.axhline(0.0, color="black", linewidth=0.5)
        ax.set_ylabel(method)
    axes[-1, 0].set_xlabel("component index")
    fig.tight_layout()
    _save(fig, out_path)


def render(spec: FigureSpec) -> None:
    """Render the requested figure; raises SchemaError on bad input."""
    if spec.kind == "vector_strip":
        rows = _read_rows(spec.csv_path, VECTOR_HEADER)
        _render_vector_strip(rows, spec.out_path)
    else:
        rows = _read_rows(spec.csv_path, EXPERIMENT_HEADER)
        if spec.kind == "error_vs_m":
            _render_error_vs_m(rows, spec.out_path)
        else:
            _render_time_vs_n(rows, spec.out_path)
