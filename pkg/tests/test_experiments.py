import json

import pytest

import homotopy_qaoa.experiments as experiments
from homotopy_qaoa import Cell, ExperimentPlan, OptimizerConfig, aggregate, run_plan
from homotopy_qaoa.cli import main as cli_main
from homotopy_qaoa.experiments import RAW_COLUMNS, read_raw_csv, run_cell_sample


def tiny_plan(out_dir, **overrides):
    fields = dict(
        nodes=[4],
        layers=[2],
        strategies=["qaoa", "hoho"],
        inits=["ZR"],
        alpha_inits=[0.0],
        alpha_steps=[0.5],
        samples=2,
        master_seed=11,
        out_dir=str(out_dir),
    )
    fields.update(overrides)
    return ExperimentPlan(**fields)


def test_plan_json_roundtrip(tmp_path):
    plan = tiny_plan(tmp_path / "a", optimizer=OptimizerConfig(max_iters=50))
    clone = ExperimentPlan.from_json(plan.to_json())
    assert clone == plan


def test_plan_validation(tmp_path):
    with pytest.raises(ValueError, match="nonempty"):
        tiny_plan(tmp_path, nodes=[])
    with pytest.raises(ValueError, match="strategy"):
        tiny_plan(tmp_path, strategies=["nope"])
    with pytest.raises(ValueError, match="init"):
        tiny_plan(tmp_path, inits=["zr"])
    with pytest.raises(ValueError, match="alpha_step"):
        tiny_plan(tmp_path, alpha_steps=[0.0])
    with pytest.raises(ValueError, match="samples"):
        tiny_plan(tmp_path, samples=0)
    with pytest.raises(ValueError, match="unknown plan fields"):
        ExperimentPlan.from_dict({"nodes": [4], "layers": [1], "bogus": 1})


def test_cells_collapse_alpha_for_plain_strategies(tmp_path):
    plan = tiny_plan(tmp_path, strategies=["qaoa", "hoho"], alpha_steps=[0.25, 0.5])
    cells = plan.cells()
    qaoa_cells = [c for c in cells if c.strategy == "qaoa"]
    hoho_cells = [c for c in cells if c.strategy == "hoho"]
    assert len(qaoa_cells) == 1  # alpha grid collapses off-strategy
    assert len(hoho_cells) == 2
    assert qaoa_cells[0].alpha_init is None


def test_run_single_cell_sample(tmp_path):
    plan = tiny_plan(tmp_path)
    cell = Cell("hoho", 4, 2, "ZR", 0.0, 0.5)
    a = run_cell_sample(plan, cell, 0)
    b = run_cell_sample(plan, cell, 0)
    assert a.final_e_norm == b.final_e_norm
    assert a.instance_hash == b.instance_hash
    # different samples draw different graphs under per-sample reuse
    c = run_cell_sample(plan, cell, 1)
    assert c.instance_hash != a.instance_hash


def test_shared_graph_reuse(tmp_path):
    plan = tiny_plan(tmp_path, graph_reuse="shared")
    cell = Cell("qaoa", 4, 2, "ZR", None, None)
    a = run_cell_sample(plan, cell, 0)
    b = run_cell_sample(plan, cell, 1)
    assert a.instance_hash == b.instance_hash


def test_run_plan_outputs(tmp_path):
    plan = tiny_plan(tmp_path / "out")
    paths = run_plan(plan)
    rows = read_raw_csv(paths.raw_csv)
    assert len(rows) == 4  # 2 cells x 2 samples
    assert list(rows[0]) == RAW_COLUMNS
    for row in rows:
        assert 0.0 <= float(row["e_norm"]) <= 1.0
    agg = (paths.aggregate_csv).read_text().splitlines()
    assert agg[0] == "strategy,n,L,init,alpha_init,alpha_step,count,median,q1,q3,best,mean,std"
    assert len(agg) == 3  # header + 2 cells

    loops = paths.loops_csv.read_text().splitlines()
    header = loops[0].split(",")
    ai = header.index("loop_alpha")
    hoho_alphas = [float(l.split(",")[ai]) for l in loops[1:] if l.startswith("hoho")
                   and l.split(",")[header.index("sample")] == "0"]
    assert hoho_alphas == [0.0, 0.5, 1.0]

    manifest = json.loads(paths.manifest.read_text())
    assert all(j["status"] == "done" for j in manifest["jobs"].values())
    assert all("wall_ms" in j for j in manifest["jobs"].values())


def test_single_cell_single_sample(tmp_path):
    plan = tiny_plan(tmp_path / "single", strategies=["qaoa"], samples=1)
    paths = run_plan(plan)
    assert len(read_raw_csv(paths.raw_csv)) == 1
    assert len(paths.aggregate_csv.read_text().splitlines()) == 2


def test_rerun_is_idempotent(tmp_path, monkeypatch):
    plan = tiny_plan(tmp_path / "idem")
    paths = run_plan(plan)
    raw_before = paths.raw_csv.read_bytes()
    loops_before = paths.loops_csv.read_bytes()
    agg_before = paths.aggregate_csv.read_bytes()

    def boom(*args, **kwargs):
        raise AssertionError("completed jobs must not be recomputed")

    monkeypatch.setattr(experiments, "run_cell_sample", boom)
    paths2 = run_plan(tiny_plan(tmp_path / "idem"))
    assert paths2.raw_csv.read_bytes() == raw_before
    assert paths2.loops_csv.read_bytes() == loops_before
    assert paths2.aggregate_csv.read_bytes() == agg_before


def test_plan_mismatch_is_rejected(tmp_path):
    run_plan(tiny_plan(tmp_path / "guard"))
    with pytest.raises(ValueError, match="different plan"):
        run_plan(tiny_plan(tmp_path / "guard", master_seed=99))


def test_determinism_byte_identical(tmp_path):
    a = run_plan(tiny_plan(tmp_path / "a"))
    b = run_plan(tiny_plan(tmp_path / "b"))
    assert a.raw_csv.read_bytes() == b.raw_csv.read_bytes()
    assert a.loops_csv.read_bytes() == b.loops_csv.read_bytes()
    assert a.aggregate_csv.read_bytes() == b.aggregate_csv.read_bytes()


def test_failed_jobs_recorded_not_fatal(tmp_path, monkeypatch):
    plan = tiny_plan(tmp_path / "fail", strategies=["qaoa"], samples=3)

    real = run_cell_sample

    def flaky(plan_, cell, sample):
        if sample == 1:
            raise RuntimeError("synthetic failure")
        return real(plan_, cell, sample)

    monkeypatch.setattr(experiments, "run_cell_sample", flaky)
    paths = run_plan(plan)
    manifest = json.loads(paths.manifest.read_text())
    statuses = sorted(j["status"] for j in manifest["jobs"].values())
    assert statuses == ["done", "done", "failed"]
    assert len(read_raw_csv(paths.raw_csv)) == 2
    failed = [j for j in manifest["jobs"].values() if j["status"] == "failed"]
    assert "synthetic failure" in failed[0]["error"]


def make_rows(values, **cell):
    base = dict(
        strategy="qaoa", n="4", L="2", init="ZR", alpha_init="", alpha_step="",
        sample="0", seed="1", instance_hash="abc", final_energy="0.0",
        iterations_total="1",
    )
    base.update(cell)
    return [dict(base, e_norm=repr(float(v)), sample=str(i)) for i, v in enumerate(values)]


def test_aggregate_percentiles_frozen_example():
    rows = make_rows([0.1, 0.2, 0.3, 0.4])
    (agg,) = aggregate(rows)
    assert agg.median == pytest.approx(0.25, abs=1e-15)
    assert agg.q1 == pytest.approx(0.175, abs=1e-15)
    assert agg.q3 == pytest.approx(0.325, abs=1e-15)
    assert agg.best == 0.1
    assert agg.count == 4


def test_aggregate_all_equal():
    (agg,) = aggregate(make_rows([0.3, 0.3, 0.3]))
    assert agg.median == agg.q1 == agg.q3 == agg.best == 0.3
    assert agg.std == 0.0


def test_aggregate_invariants_and_order_independence(rng):
    values = list(rng.uniform(0, 1, 21))
    rows = make_rows(values)
    (agg,) = aggregate(rows)
    assert agg.best <= agg.q1 <= agg.median <= agg.q3
    shuffled = list(rows)
    rng.shuffle(shuffled)
    assert aggregate(shuffled) == [agg]


def test_aggregate_groups_cells():
    rows = make_rows([0.1, 0.2]) + make_rows([0.5, 0.7], strategy="hoho",
                                             alpha_init="0.0", alpha_step="0.5")
    aggs = aggregate(rows)
    assert [a.strategy for a in aggs] == ["hoho", "qaoa"]
    assert aggs[0].alpha_init == 0.0
    assert aggs[1].alpha_init is None


def test_worker_pool_matches_serial(tmp_path):
    serial = run_plan(tiny_plan(tmp_path / "serial"))
    pooled = run_plan(tiny_plan(tmp_path / "pooled"), workers=2)
    assert pooled.raw_csv.read_bytes() == serial.raw_csv.read_bytes()
    assert pooled.loops_csv.read_bytes() == serial.loops_csv.read_bytes()


def test_workers_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv(experiments.WORKERS_ENV, "0")
    with pytest.raises(ValueError, match="worker count"):
        run_plan(tiny_plan(tmp_path / "w"))


def test_cli_gen_graphs_and_scan(tmp_path, capsys):
    out = tmp_path / "graphs"
    cli_main(["gen-graphs", "--nodes", "5", "--m", "2", "--count", "2",
              "--seed", "3", "--out", str(out)])
    files = sorted(p.name for p in out.glob("*.json"))
    assert files == ["ba_n5_s3_0.json", "ba_n5_s3_1.json"]

    scan_csv = tmp_path / "scan.csv"
    cli_main(["scan-landscape", "--instance", str(out / files[0]), "--layer", "0",
              "--param", "gamma", "--grid-size", "64", "--layers", "2",
              "--out", str(scan_csv)])
    lines = scan_csv.read_text().splitlines()
    assert lines[0] == "theta,energy,e_norm"
    assert len(lines) == 65
    e_norms = [float(l.split(",")[2]) for l in lines[1:]]
    assert all(-1e-12 <= v <= 1 + 1e-12 for v in e_norms)


def test_cli_run_and_aggregate(tmp_path, capsys):
    plan = tiny_plan(tmp_path / "cli", strategies=["qaoa"], samples=1)
    plan_file = tmp_path / "plan.json"
    plan_file.write_text(plan.to_json())
    cli_main(["run", "--plan", str(plan_file)])

    agg_out = tmp_path / "agg2.csv"
    cli_main(["aggregate", "--raw", str(tmp_path / "cli" / "raw.csv"),
              "--out", str(agg_out)])
    assert agg_out.read_text() == (tmp_path / "cli" / "aggregate.csv").read_text()


def test_cli_benchmark_smoke(tmp_path):
    cli_main(["benchmark", "--nodes", "4", "--layers", "2", "--strategies", "qaoa",
              "--samples", "1", "--seed", "5", "--out", str(tmp_path / "bench")])
    assert (tmp_path / "bench" / "raw.csv").exists()
