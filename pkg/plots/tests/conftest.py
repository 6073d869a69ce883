import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

RAW_COLUMNS = [
    "strategy", "n", "L", "init", "alpha_init", "alpha_step",
    "sample", "seed", "instance_hash", "final_energy", "e_norm",
    "iterations_total",
]
AGG_COLUMNS = [
    "strategy", "n", "L", "init", "alpha_init", "alpha_step",
    "count", "median", "q1", "q3", "best", "mean", "std",
]


def write_csv(path, columns, rows):
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join("" if v is None else (repr(v) if isinstance(v, float) else str(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")


def make_cells(cells, samples, seed=0):
    """Raw and aggregate rows for synthetic cells, statistically consistent."""
    rng = np.random.default_rng(seed)
    raw, agg = [], []
    for strategy, n, layers, init, ai, a_step, level in cells:
        values = np.sort(rng.uniform(level, min(level + 0.2, 1.0), samples))
        for i, v in enumerate(values):
            raw.append([strategy, n, layers, init, ai, a_step, i, 1000 + i, "feedbeef", float(v * 10 - 5), float(v), 17])
        q1, med, q3 = np.percentile(values, [25, 50, 75])
        agg.append([
            strategy, n, layers, init, ai, a_step, samples,
            float(med), float(q1), float(q3), float(values.min()),
            float(values.mean()), float(values.std()),
        ])
    return raw, agg


@pytest.fixture
def benchmark_csvs(tmp_path):
    cells = [
        (s, 10, L, "ZR", 0.0 if s == "hoho" else None, 0.01 if s == "hoho" else None, base + 0.01 * L)
        for s, base in [("qaoa", 0.2), ("tqaoa", 0.15), ("hoho", 0.05)]
        for L in (5, 10, 20)
    ]
    raw, agg = make_cells(cells, samples=12)
    raw_path, agg_path = tmp_path / "raw.csv", tmp_path / "agg.csv"
    write_csv(raw_path, RAW_COLUMNS, raw)
    write_csv(agg_path, AGG_COLUMNS, agg)
    return raw_path, agg_path


@pytest.fixture
def sweep_csvs(tmp_path):
    cells = [
        ("hoho", n, 3, "ZR", ai, 0.05, 0.05 + 0.3 * ai * ai + 0.01 * n)
        for n in (6, 10)
        for ai in (0.0, 0.1, 0.3, 0.5, 0.7, 0.9)
    ]
    raw, agg = make_cells(cells, samples=9, seed=3)
    raw_path, agg_path = tmp_path / "sweep_raw.csv", tmp_path / "sweep_agg.csv"
    write_csv(raw_path, RAW_COLUMNS, raw)
    write_csv(agg_path, AGG_COLUMNS, agg)
    return raw_path, agg_path


@pytest.fixture
def init_csvs(tmp_path):
    cells = [
        ("hoho", 10, 3, kind, ai, 0.05, base + 0.2 * ai)
        for kind, base in [("ZR", 0.05), ("NZR", 0.08), ("RR", 0.15)]
        for ai in (0.1, 0.4)
    ]
    raw, agg = make_cells(cells, samples=10, seed=5)
    raw_path, agg_path = tmp_path / "init_raw.csv", tmp_path / "init_agg.csv"
    write_csv(raw_path, RAW_COLUMNS, raw)
    write_csv(agg_path, AGG_COLUMNS, agg)
    return raw_path, agg_path


@pytest.fixture
def scan_csvs(tmp_path):
    thetas = np.linspace(0, 2 * np.pi, 128, endpoint=False)
    paths = []
    for name, freqs in [("gamma_scan", (2, 6, 8)), ("beta_scan", (2, 4))]:
        energies = sum(np.cos(f * thetas + 0.3 * f) for f in freqs)
        e_norm = (energies - energies.min()) / (energies.max() - energies.min())
        path = tmp_path / f"{name}.csv"
        write_csv(
            path,
            ["theta", "energy", "e_norm"],
            [[float(t), float(e), float(v)] for t, e, v in zip(thetas, energies, e_norm)],
        )
        paths.append(path)
    return paths
