"""Experiment plans, deterministic job execution, and CSV aggregation.

A plan is a cross product of cells (n, layers, strategy, init, homotopy
parameters) times a number of samples.  Every job is a pure function of
(master seed, cell, sample index): the graph instance derives from
(master seed, "graph", n, sample) and the run stream from
(master seed, "run", strategy, n, layers, init, sample), so adding cells
never perturbs existing results.  Jobs persist as one JSON file each; the
CSV outputs are regenerated deterministically from those files, which makes
re-runs idempotent and replays byte-identical.

Timing is recorded per job in the manifest only; the CSV outputs carry no
volatile columns.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import generate_ba_graph, graph_hash
from .hamiltonian import maxcut_objective
from .optimize import OptimizerConfig
from .seeds import rng_for, seed_int
from .strategies import (
    INIT_KINDS,
    STRATEGY_TAGS,
    HomotopyConfig,
    InitStrategy,
    RunRecord,
    run_hoho,
    run_qaoa,
    run_tqaoa,
)

log = logging.getLogger(__name__)

WORKERS_ENV = "HOMOTOPY_QAOA_WORKERS"

RAW_COLUMNS = [
    "strategy", "n", "L", "init", "alpha_init", "alpha_step",
    "sample", "seed", "instance_hash", "final_energy", "e_norm",
    "iterations_total",
]
LOOP_COLUMNS = [
    "strategy", "n", "L", "init", "alpha_init", "alpha_step",
    "sample", "seed", "instance_hash", "loop_index", "loop_alpha",
    "loop_layers", "loop_energy", "loop_e_norm", "loop_iters",
]
AGG_COLUMNS = [
    "strategy", "n", "L", "init", "alpha_init", "alpha_step",
    "count", "median", "q1", "q3", "best", "mean", "std",
]


@dataclass(frozen=True)
class Cell:
    """One experimental configuration; homotopy fields are None off-strategy."""

    strategy: str
    n: int
    layers: int
    init_kind: str
    alpha_init: float | None
    alpha_step: float | None

    def sort_key(self):
        return (
            self.strategy, self.n, self.layers, self.init_kind,
            -1.0 if self.alpha_init is None else self.alpha_init,
            -1.0 if self.alpha_step is None else self.alpha_step,
        )

    def job_id(self, sample: int) -> str:
        parts = [self.strategy, f"n{self.n}", f"L{self.layers}", self.init_kind]
        if self.strategy == "hoho":
            parts.append(f"ai{self.alpha_init!r}")
            parts.append(f"as{self.alpha_step!r}")
        parts.append(f"s{sample}")
        return "_".join(parts)


@dataclass
class ExperimentPlan:
    nodes: list[int]
    layers: list[int]
    strategies: list[str] = field(default_factory=lambda: ["hoho"])
    inits: list[str] = field(default_factory=lambda: ["ZR"])
    alpha_inits: list[float] = field(default_factory=lambda: [0.0])
    alpha_steps: list[float] = field(default_factory=lambda: [0.01])
    samples: int = 100
    master_seed: int = 0
    graph_reuse: str = "per-sample"  # "per-sample" or "shared"
    m: int = 2
    tqaoa_layers_start: int = 4
    nzr_width: float = 0.05
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    out_dir: str = "runs"

    def __post_init__(self):
        for name in ("nodes", "layers", "strategies", "inits", "alpha_inits", "alpha_steps"):
            if not getattr(self, name):
                raise ValueError(f"plan field {name!r} must be a nonempty list")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        for s in self.strategies:
            if s not in STRATEGY_TAGS:
                raise ValueError(f"unknown strategy {s!r}; expected one of {STRATEGY_TAGS}")
        for i in self.inits:
            if i not in INIT_KINDS:
                raise ValueError(f"unknown init {i!r}; expected one of {INIT_KINDS}")
        for a in self.alpha_inits:
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"alpha_init {a} outside [0, 1]")
        for a in self.alpha_steps:
            if not 0.0 < a <= 1.0:
                raise ValueError(f"alpha_step {a} outside (0, 1]")
        if self.graph_reuse not in ("per-sample", "shared"):
            raise ValueError('graph_reuse must be "per-sample" or "shared"')
        if isinstance(self.optimizer, dict):
            self.optimizer = OptimizerConfig(**self.optimizer)

    def cells(self) -> list[Cell]:
        out: dict[Cell, None] = {}
        for strategy in self.strategies:
            for n in self.nodes:
                for layers in self.layers:
                    for init in self.inits:
                        if strategy == "hoho":
                            for ai in self.alpha_inits:
                                for a_step in self.alpha_steps:
                                    out[Cell(strategy, n, layers, init, ai, a_step)] = None
                        else:
                            out[Cell(strategy, n, layers, init, None, None)] = None
        return list(out)

    def to_dict(self) -> dict:
        doc = dataclasses.asdict(self)
        doc["optimizer"] = dataclasses.asdict(self.optimizer)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentPlan":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown plan fields: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentPlan":
        return cls.from_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def run_cell_sample(plan: ExperimentPlan, cell: Cell, sample: int) -> RunRecord:
    """Execute one job; pure given (plan.master_seed, cell, sample)."""
    graph_sample = sample if plan.graph_reuse == "per-sample" else 0
    g = generate_ba_graph(cell.n, plan.m, rng_for(plan.master_seed, "graph", cell.n, graph_sample))
    diag = maxcut_objective(g)
    instance = graph_hash(g)
    keys = ("run", cell.strategy, cell.n, cell.layers, cell.init_kind, sample)
    rng = rng_for(plan.master_seed, *keys)
    seed = seed_int(plan.master_seed, *keys)
    init = InitStrategy(cell.init_kind, plan.nzr_width)

    if cell.strategy == "qaoa":
        return run_qaoa(diag, cell.layers, init, plan.optimizer, rng, instance, seed)
    if cell.strategy == "tqaoa":
        return run_tqaoa(
            diag, cell.layers, init, plan.optimizer, rng,
            layers_start=min(plan.tqaoa_layers_start, cell.layers),
            instance_hash=instance, seed=seed,
        )
    config = HomotopyConfig(
        alpha_init=cell.alpha_init, alpha_step=cell.alpha_step,
        layers=cell.layers, init=init, optimizer=plan.optimizer,
    )
    return run_hoho(diag, config, rng, instance, seed)


def _fmt(value) -> str:
    """Locale-independent, full-precision CSV field."""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _record_to_job_doc(cell: Cell, sample: int, rec: RunRecord) -> dict:
    return {
        "cell": dataclasses.asdict(cell),
        "sample": sample,
        "seed": rec.seed,
        "instance_hash": rec.instance_hash,
        "final_energy": rec.final_energy,
        "e_norm": rec.final_e_norm,
        "iterations_total": rec.iterations_total,
        "loops": [
            [i, lp.alpha, lp.layers, lp.energy_star, lp.e_norm_star, lp.iterations]
            for i, lp in enumerate(rec.loops)
        ],
    }


def _job_rows(doc: dict) -> tuple[list, list[list]]:
    c = doc["cell"]
    prefix = [
        c["strategy"], c["n"], c["layers"], c["init_kind"],
        c["alpha_init"], c["alpha_step"], doc["sample"], doc["seed"],
        doc["instance_hash"],
    ]
    raw = prefix + [doc["final_energy"], doc["e_norm"], doc["iterations_total"]]
    loops = [prefix + loop for loop in doc["loops"]]
    return raw, loops


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_csv(path: Path, columns: list[str], rows) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write_text(path, "\n".join(lines) + "\n")


@dataclass(frozen=True)
class AggregateRow:
    strategy: str
    n: int
    layers: int
    init_kind: str
    alpha_init: float | None
    alpha_step: float | None
    count: int
    median: float
    q1: float
    q3: float
    best: float
    mean: float
    std: float


def aggregate(raw_rows) -> list[AggregateRow]:
    """Per-cell statistics of the final normalized energies.

    Median and quartiles use linear interpolation; std is the population
    standard deviation.  Cells are emitted in deterministic sort order.
    """
    groups: dict[tuple, list[float]] = {}
    for row in raw_rows:
        key = (
            row["strategy"], int(row["n"]), int(row["L"]), row["init"],
            _parse_optional_float(row["alpha_init"]),
            _parse_optional_float(row["alpha_step"]),
        )
        groups.setdefault(key, []).append(float(row["e_norm"]))

    out = []
    for key in sorted(groups, key=_group_sort_key):
        # canonical value order: statistics are independent of row order
        values = np.sort(np.asarray(groups[key]))
        if values.size == 0:
            log.warning("cell %s has no samples; skipped", key)
            continue
        q1, median, q3 = np.percentile(values, [25, 50, 75])
        out.append(
            AggregateRow(
                strategy=key[0], n=key[1], layers=key[2], init_kind=key[3],
                alpha_init=key[4], alpha_step=key[5], count=int(values.size),
                median=float(median), q1=float(q1), q3=float(q3),
                best=float(values.min()), mean=float(values.mean()),
                std=float(values.std()),
            )
        )
    return out


def _parse_optional_float(value):
    if value is None or value == "":
        return None
    return float(value)


def _group_sort_key(key):
    return (
        key[0], key[1], key[2], key[3],
        -1.0 if key[4] is None else key[4],
        -1.0 if key[5] is None else key[5],
    )


def read_raw_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@dataclass(frozen=True)
class PlanPaths:
    out_dir: Path
    raw_csv: Path
    loops_csv: Path
    aggregate_csv: Path
    manifest: Path


def _resolve_workers(workers) -> int:
    if workers is None:
        workers = os.environ.get(WORKERS_ENV, "1")
    workers = int(workers)
    if workers < 1:
        raise ValueError(f"worker count must be positive, got {workers}")
    return workers


def _pool_job(args):
    plan_doc, cell_doc, sample = args
    plan = ExperimentPlan.from_dict(plan_doc)
    cell = Cell(**cell_doc)
    job_id = cell.job_id(sample)
    t0 = time.perf_counter()
    try:
        rec = run_cell_sample(plan, cell, sample)
    except Exception as exc:  # failures are recorded in the manifest, not fatal
        return job_id, None, f"{type(exc).__name__}: {exc}", 0.0
    doc = _record_to_job_doc(cell, sample, rec)
    return job_id, doc, None, 1e3 * (time.perf_counter() - t0)


def run_plan(plan: ExperimentPlan, workers=None) -> PlanPaths:
    """Execute all pending jobs of a plan and (re)emit its CSV outputs.

    Completed jobs are skipped via the manifest; per-job failures are
    recorded there without aborting the plan.  Output CSVs are regenerated
    from the job files on every call, atomically.
    """
    out_dir = Path(plan.out_dir)
    jobs_dir = out_dir / "jobs"
    jobs_dir.mkdir(parents=True, exist_ok=True)
    paths = PlanPaths(
        out_dir=out_dir,
        raw_csv=out_dir / "raw.csv",
        loops_csv=out_dir / "loops.csv",
        aggregate_csv=out_dir / "aggregate.csv",
        manifest=out_dir / "manifest.json",
    )

    plan_doc = plan.to_dict()
    manifest = {"plan": plan_doc, "jobs": {}}
    if paths.manifest.exists():
        manifest = json.loads(paths.manifest.read_text())
        previous = {k: v for k, v in manifest["plan"].items() if k != "out_dir"}
        current = {k: v for k, v in plan_doc.items() if k != "out_dir"}
        if previous != current:
            raise ValueError(
                f"output directory {out_dir} already holds results for a different plan"
            )
        manifest["plan"] = plan_doc

    jobs = [(cell, sample) for cell in plan.cells() for sample in range(plan.samples)]
    pending = [
        (cell, sample)
        for cell, sample in jobs
        if manifest["jobs"].get(cell.job_id(sample), {}).get("status") != "done"
        or not (jobs_dir / f"{cell.job_id(sample)}.json").exists()
    ]

    workers = _resolve_workers(workers)
    log.info("plan: %d jobs total, %d pending, %d workers", len(jobs), len(pending), workers)

    def finish(job_id, doc, wall_ms):
        _atomic_write_text(
            jobs_dir / f"{job_id}.json", json.dumps(doc, sort_keys=True) + "\n"
        )
        manifest["jobs"][job_id] = {"status": "done", "wall_ms": round(wall_ms, 3)}

    def fail(job_id, exc):
        log.warning("job %s failed: %s", job_id, exc)
        manifest["jobs"][job_id] = {"status": "failed", "error": f"{type(exc).__name__}: {exc}"}

    if workers == 1 or len(pending) <= 1:
        for cell, sample in pending:
            job_id = cell.job_id(sample)
            t0 = time.perf_counter()
            try:
                rec = run_cell_sample(plan, cell, sample)
            except Exception as exc:
                fail(job_id, exc)
                continue
            finish(job_id, _record_to_job_doc(cell, sample, rec), 1e3 * (time.perf_counter() - t0))
    else:
        args = [(plan_doc, dataclasses.asdict(c), s) for c, s in pending]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for job_id, doc, error, wall_ms in pool.map(_pool_job, args, chunksize=1):
                if error is not None:
                    log.warning("job %s failed: %s", job_id, error)
                    manifest["jobs"][job_id] = {"status": "failed", "error": error}
                else:
                    finish(job_id, doc, wall_ms)

    _atomic_write_text(paths.manifest, json.dumps(manifest, indent=2, sort_keys=True) + "\n")

    raw_rows, loop_rows = [], []
    for cell, sample in sorted(jobs, key=lambda j: (j[0].sort_key(), j[1])):
        job_id = cell.job_id(sample)
        if manifest["jobs"].get(job_id, {}).get("status") != "done":
            continue
        doc = json.loads((jobs_dir / f"{job_id}.json").read_text())
        raw, loops = _job_rows(doc)
        raw_rows.append(raw)
        loop_rows.extend(loops)

    _write_csv(paths.raw_csv, RAW_COLUMNS, raw_rows)
    _write_csv(paths.loops_csv, LOOP_COLUMNS, loop_rows)
    agg_rows = aggregate(
        [dict(zip(RAW_COLUMNS, (_fmt(v) for v in row))) for row in raw_rows]
    )
    _write_csv(
        paths.aggregate_csv,
        AGG_COLUMNS,
        [
            [
                r.strategy, r.n, r.layers, r.init_kind, r.alpha_init, r.alpha_step,
                r.count, r.median, r.q1, r.q3, r.best, r.mean, r.std,
            ]
            for r in agg_rows
        ],
    )
    return paths
