"""Figure rendering for the experiment harness CSV outputs.

This package is deliberately decoupled from the solver: it consumes only the
CSV files (raw runs, per-cell aggregates, landscape scans) and re-derives any
statistic it draws, refusing to render when its own derivation disagrees with
the aggregate file beyond 1e-12.  Output images are pure functions of the
input bytes: fixed style, fixed SVG hash salt, no embedded dates.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_CLASSES = (
    "init-comparison",
    "stability-sweep",
    "benchmark-layers",
    "benchmark-nodes",
    "landscape",
)

RAW_REQUIRED = ["strategy", "n", "L", "init", "alpha_init", "alpha_step", "e_norm"]
AGG_REQUIRED = RAW_REQUIRED[:6] + ["count", "median", "q1", "q3", "best", "mean", "std"]
SCAN_REQUIRED = ["theta", "energy", "e_norm"]

STAT_TOL = 1e-12

_STYLE = {
    "figure.figsize": (7.0, 4.2),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "homotopy-qaoa-plots",
}

_SERIES_COLORS = {
    "qaoa": "tab:blue",
    "tqaoa": "tab:orange",
    "hoho": "tab:green",
    "RR": "tab:red",
    "NZR": "tab:purple",
    "ZR": "tab:green",
}


class SchemaError(ValueError):
    """An input CSV does not carry the expected columns."""


def load_csv(path, required) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        columns = reader.fieldnames or []
        for col in required:
            if col not in columns:
                raise SchemaError(f"missing column {col!r} in {path}")
        return list(reader)


def _cell_key(row) -> tuple:
    return (
        row["strategy"], int(row["n"]), int(row["L"]), row["init"],
        row["alpha_init"], row["alpha_step"],
    )


def recompute_aggregate(raw_rows) -> dict[tuple, dict[str, float]]:
    """Per-cell statistics straight from raw rows: linear-interpolation
    percentiles, population standard deviation, sorted accumulation order."""
    groups: dict[tuple, list[float]] = {}
    for row in raw_rows:
        groups.setdefault(_cell_key(row), []).append(float(row["e_norm"]))
    out = {}
    for key, values in groups.items():
        vals = np.sort(np.asarray(values))
        q1, median, q3 = np.percentile(vals, [25, 50, 75])
        out[key] = {
            "count": float(vals.size),
            "median": float(median),
            "q1": float(q1),
            "q3": float(q3),
            "best": float(vals.min()),
            "mean": float(vals.mean()),
            "std": float(vals.std()),
        }
    return out


def verify_statistics(agg_rows, raw_rows) -> None:
    """Every aggregate statistic must match its re-derivation within 1e-12."""
    derived = recompute_aggregate(raw_rows)
    for row in agg_rows:
        key = _cell_key(row)
        if key not in derived:
            raise ValueError(f"aggregate cell {key} has no raw rows")
        for stat, value in derived[key].items():
            stated = float(row[stat])
            if abs(stated - value) > STAT_TOL:
                raise ValueError(
                    f"aggregate {stat} for cell {key} is {stated!r} but raw rows "
                    f"give {value!r} (difference exceeds {STAT_TOL})"
                )


@dataclass(frozen=True)
class FigureSpec:
    figure: str
    inputs: tuple[str, ...]
    out: str
    raw: str | None = None  # optional raw CSV for the consistency cross-check
    y_scale: str = "linear"

    @classmethod
    def from_dict(cls, doc: dict) -> "FigureSpec":
        unknown = set(doc) - {"figure", "inputs", "out", "raw", "y_scale"}
        if unknown:
            raise ValueError(f"unknown figure spec fields: {sorted(unknown)}")
        for field in ("figure", "inputs", "out"):
            if field not in doc:
                raise ValueError(f"figure spec is missing {field!r}")
        if doc["figure"] not in FIGURE_CLASSES:
            raise ValueError(
                f"unknown figure class {doc['figure']!r}; expected one of {FIGURE_CLASSES}"
            )
        if doc.get("y_scale", "linear") not in ("linear", "log"):
            raise ValueError("y_scale must be 'linear' or 'log'")
        return cls(
            figure=doc["figure"],
            inputs=tuple(doc["inputs"]),
            out=doc["out"],
            raw=doc.get("raw"),
            y_scale=doc.get("y_scale", "linear"),
        )


def _series_color(label):
    return _SERIES_COLORS.get(str(label))


def _plot_quartile_series(ax, rows, x_of, series_of, x_label):
    series = sorted({series_of(r) for r in rows})
    for name in series:
        sub = sorted((r for r in rows if series_of(r) == name), key=x_of)
        xs = [x_of(r) for r in sub]
        med = [float(r["median"]) for r in sub]
        q1 = [float(r["q1"]) for r in sub]
        q3 = [float(r["q3"]) for r in sub]
        best = [float(r["best"]) for r in sub]
        color = _series_color(name)
        (line,) = ax.plot(xs, med, marker="o", label=str(name), color=color)
        ax.fill_between(xs, q1, q3, alpha=0.25, color=line.get_color())
        ax.plot(xs, best, linestyle="--", color=line.get_color())
    ax.set_xlabel(x_label)
    ax.set_ylabel("optimized normalized energy")
    ax.legend()


def _fig_benchmark(agg_rows, x_column, y_scale):
    fig, ax = plt.subplots()
    # one series per strategy, split further by init when several are present
    inits = {r["init"] for r in agg_rows}
    if len(inits) == 1:
        series_of = lambda r: r["strategy"]  # noqa: E731
    else:
        series_of = lambda r: f"{r['strategy']}/{r['init']}"  # noqa: E731
    _plot_quartile_series(
        ax,
        agg_rows,
        x_of=lambda r: int(r[x_column]),
        series_of=series_of,
        x_label="layers" if x_column == "L" else "nodes",
    )
    ax.set_yscale(y_scale)
    ax.set_title(
        "strategy comparison over " + ("circuit depth" if x_column == "L" else "problem size")
    )
    return fig


def _fig_init_comparison(agg_rows, y_scale):
    rows = [r for r in agg_rows if r["strategy"] == "hoho"]
    if not rows:
        raise ValueError("init-comparison needs aggregate rows for the homotopy strategy")
    fig, ax = plt.subplots()
    _plot_quartile_series(
        ax,
        rows,
        x_of=lambda r: float(r["alpha_init"]),
        series_of=lambda r: r["init"],
        x_label="starting alpha",
    )
    ax.set_yscale(y_scale)
    ax.set_title("initialization comparison")
    return fig


def _fig_stability(agg_rows, y_scale):
    rows = [r for r in agg_rows if r["strategy"] == "hoho"]
    if not rows:
        raise ValueError("stability-sweep needs aggregate rows for the homotopy strategy")
    # the swept homotopy parameter is whichever alpha column actually varies
    inits = {r["alpha_init"] for r in rows}
    steps = {r["alpha_step"] for r in rows}
    x_column = "alpha_init" if len(inits) >= len(steps) else "alpha_step"

    fig, ax = plt.subplots()
    for n in sorted({int(r["n"]) for r in rows}):
        sub = sorted((r for r in rows if int(r["n"]) == n), key=lambda r: float(r[x_column]))
        xs = np.array([float(r[x_column]) for r in sub])
        mean = np.array([float(r["mean"]) for r in sub])
        std = np.array([float(r["std"]) for r in sub])
        (line,) = ax.plot(xs, mean, marker="o", label=f"{n} nodes")
        ax.fill_between(xs, mean - std, mean + std, alpha=0.25, color=line.get_color())
    ax.set_xlabel(x_column.replace("_", " "))
    ax.set_ylabel("optimized normalized energy")
    ax.set_yscale(y_scale)
    ax.set_title("region of stability")
    ax.legend()
    return fig


def _fig_landscape(paths, y_scale):
    scans = [(Path(p).stem, load_csv(p, SCAN_REQUIRED)) for p in paths]
    fig, axes = plt.subplots(1, len(scans), figsize=(4.5 * len(scans), 3.6), squeeze=False)
    for ax, (name, rows) in zip(axes[0], scans):
        thetas = [float(r["theta"]) for r in rows]
        e_norm = [float(r["e_norm"]) for r in rows]
        ax.plot(thetas, e_norm)
        ax.set_xlabel("swept angle")
        ax.set_ylabel("normalized energy")
        ax.set_yscale(y_scale)
        ax.set_title(name)
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> list[Path]:
    """Render one figure class; returns the written image paths (PNG and SVG)."""
    with plt.rc_context(_STYLE):
        if spec.figure == "landscape":
            fig = _fig_landscape(spec.inputs, spec.y_scale)
        else:
            agg_rows = []
            for path in spec.inputs:
                agg_rows.extend(load_csv(path, AGG_REQUIRED))
            if spec.raw is not None:
                verify_statistics(agg_rows, load_csv(spec.raw, RAW_REQUIRED))
            if spec.figure == "benchmark-layers":
                fig = _fig_benchmark(agg_rows, "L", spec.y_scale)
            elif spec.figure == "benchmark-nodes":
                fig = _fig_benchmark(agg_rows, "n", spec.y_scale)
            elif spec.figure == "init-comparison":
                fig = _fig_init_comparison(agg_rows, spec.y_scale)
            else:
                fig = _fig_stability(agg_rows, spec.y_scale)

        out = Path(spec.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        png = out if out.suffix == ".png" else out.with_suffix(".png")
        svg = png.with_suffix(".svg")
        # identical bytes on identical inputs: strip volatile metadata
        fig.savefig(png, metadata={"Software": "figlib"})
        fig.savefig(svg, metadata={"Date": None})
        plt.close(fig)
    return [png, svg]
