import numpy as np
import pytest

from homotopy_qaoa import (
    HomotopyConfig,
    InitStrategy,
    OptimizerConfig,
    QaoaParams,
    WeightedGraph,
    alpha_schedule,
    energy,
    extend_params,
    init_params,
    maxcut_objective,
    normalize_energy,
    run_hoho,
    run_qaoa,
    run_tqaoa,
)
from homotopy_qaoa.seeds import rng_for

from conftest import random_instance

OPT = OptimizerConfig()


def test_init_strategy_validation():
    with pytest.raises(ValueError):
        InitStrategy("XX")
    with pytest.raises(ValueError):
        InitStrategy("NZR", near_zero_width=0.0)


def test_init_params_distributions():
    rng = np.random.default_rng(4)
    zr = init_params(InitStrategy("ZR"), 3, rng)
    assert zr.gammas.tolist() == [0.0, 0.0, 0.0]
    assert np.all((0 <= zr.betas) & (zr.betas < 2 * np.pi))

    nzr = init_params(InitStrategy("NZR"), 2, rng)
    assert np.all((0 <= nzr.gammas) & (nzr.gammas < 0.05))
    assert np.all((0 <= nzr.betas) & (nzr.betas < 2 * np.pi))

    rr = init_params(InitStrategy("RR"), 50, rng)
    assert np.all((0 <= rr.gammas) & (rr.gammas < 2 * np.pi))
    assert rr.gammas.max() > 0.05  # actually spread over the full range


def test_init_params_deterministic():
    a = init_params(InitStrategy("RR"), 4, np.random.default_rng(123))
    b = init_params(InitStrategy("RR"), 4, np.random.default_rng(123))
    assert np.array_equal(a.gammas, b.gammas)
    assert np.array_equal(a.betas, b.betas)


def test_alpha_schedule():
    assert alpha_schedule(1.0, 0.5) == [1.0]
    assert alpha_schedule(0.0, 0.3) == [0.0, 0.3, 0.6, 0.8999999999999999, 1.0]
    assert alpha_schedule(0.5, 0.25) == [0.5, 0.75, 1.0]
    sched = alpha_schedule(0.0, 0.01)
    assert len(sched) == 101
    assert sched[-1] == 1.0
    assert np.all(np.diff(sched) > 0)
    # exact hit on 1.0 does not duplicate the final loop
    assert alpha_schedule(0.6, 0.2) == [0.6, 0.8, 1.0]
    with pytest.raises(ValueError):
        alpha_schedule(-0.1, 0.5)
    with pytest.raises(ValueError):
        alpha_schedule(0.0, 0.0)


def test_homotopy_config_validation():
    with pytest.raises(ValueError):
        HomotopyConfig(alpha_init=1.2, alpha_step=0.1, layers=2)
    with pytest.raises(ValueError):
        HomotopyConfig(alpha_init=0.0, alpha_step=0.0, layers=2)
    with pytest.raises(ValueError):
        HomotopyConfig(alpha_init=0.0, alpha_step=0.1, layers=0)


def test_extend_params():
    rng = np.random.default_rng(5)
    p = QaoaParams(gammas=[0.1, 0.2], betas=[0.3, 0.4])
    q = extend_params(p, rng)
    assert q.layers == 3
    assert np.array_equal(q.gammas[:2], p.gammas)
    assert np.array_equal(q.betas[:2], p.betas)
    assert q.betas[2] == 0.0
    assert 0 <= q.gammas[2] < 2 * np.pi


def test_run_qaoa_single_edge_reaches_zero():
    diag = maxcut_objective(WeightedGraph(n=2, edges=((0, 1, 1),)))
    best = min(
        run_qaoa(diag, 1, InitStrategy("RR"), OPT, np.random.default_rng(seed)).final_e_norm
        for seed in range(8)
    )
    assert best < 1e-6


def test_run_records_in_unit_interval():
    for seed in range(3):
        diag = maxcut_objective(random_instance(6, seed))
        rec = run_qaoa(diag, 2, InitStrategy("ZR"), OPT, np.random.default_rng(seed))
        assert 0.0 <= rec.final_e_norm <= 1.0
        assert rec.strategy == "qaoa"
        assert rec.loops[0].alpha == 1.0
        assert rec.iterations_total == rec.loops[0].iterations


def test_tqaoa_without_growth_equals_qaoa():
    diag = maxcut_objective(random_instance(5, 8))
    a = run_tqaoa(diag, 4, InitStrategy("ZR"), OPT, np.random.default_rng(9), layers_start=4)
    b = run_qaoa(diag, 4, InitStrategy("ZR"), OPT, np.random.default_rng(9))
    assert a.final_energy == b.final_energy
    assert np.array_equal(a.params_star.flatten(), b.params_star.flatten())


def test_tqaoa_growth_schedule():
    diag = maxcut_objective(random_instance(5, 10))
    rec = run_tqaoa(diag, 7, InitStrategy("ZR"), OPT, np.random.default_rng(2), layers_start=4)
    assert [lp.layers for lp in rec.loops] == [4, 5, 6, 7]
    assert all(lp.alpha == 1.0 for lp in rec.loops)
    assert rec.params_star.layers == 7
    assert rec.final_energy == rec.loops[-1].energy_star
    with pytest.raises(ValueError):
        run_tqaoa(diag, 3, InitStrategy("ZR"), OPT, np.random.default_rng(2), layers_start=4)


def test_hoho_first_loop_at_zero_is_free():
    diag = maxcut_objective(random_instance(6, 4))
    config = HomotopyConfig(alpha_init=0.0, alpha_step=0.5, layers=3)
    rec = run_hoho(diag, config, np.random.default_rng(7))
    first = rec.loops[0]
    assert first.alpha == 0.0
    assert first.iterations == 0  # already the mixer ground state
    assert first.energy_star == -6.0
    assert first.e_norm_star == 0.0


def test_hoho_degenerate_schedule_equals_qaoa():
    diag = maxcut_objective(random_instance(5, 12))
    config = HomotopyConfig(alpha_init=1.0, alpha_step=0.5, layers=2)
    a = run_hoho(diag, config, np.random.default_rng(3))
    b = run_qaoa(diag, 2, InitStrategy("ZR"), OPT, np.random.default_rng(3))
    assert a.final_energy == b.final_energy
    assert np.array_equal(a.params_star.flatten(), b.params_star.flatten())


def test_hoho_loop_alphas_and_final_norm():
    diag = maxcut_objective(random_instance(5, 21))
    config = HomotopyConfig(alpha_init=0.2, alpha_step=0.25, layers=2)
    rec = run_hoho(diag, config, np.random.default_rng(5))
    alphas = [lp.alpha for lp in rec.loops]
    assert alphas == alpha_schedule(0.2, 0.25)
    assert alphas[-1] == 1.0
    assert np.all(np.diff(alphas) > 0)
    # final value is recomputed from scratch against the alpha=1 window
    recomputed = normalize_energy(energy(rec.params_star, 1.0, diag), diag.emin, diag.emax)
    assert rec.final_e_norm == recomputed
    assert 0.0 <= rec.final_e_norm <= 1.0
    # every loop knows its own window, so normalized energies stay in [0, 1]
    for lp in rec.loops:
        assert lp.e_norm_star is not None
        assert -1e-12 <= lp.e_norm_star <= 1 + 1e-12


def test_loop_energy_never_exceeds_initial(single_edge_diag):
    # the optimizer returns the best-seen iterate
    diag = maxcut_objective(random_instance(6, 30))
    config = HomotopyConfig(alpha_init=0.0, alpha_step=0.2, layers=3)
    rec = run_hoho(diag, config, np.random.default_rng(11))
    for lp in rec.loops:
        assert lp.energy_star is not None


def test_strategies_replay_bit_identically():
    diag = maxcut_objective(random_instance(6, 40))
    for runner in (
        lambda r: run_qaoa(diag, 3, InitStrategy("ZR"), OPT, r),
        lambda r: run_tqaoa(diag, 5, InitStrategy("ZR"), OPT, r, layers_start=4),
        lambda r: run_hoho(diag, HomotopyConfig(0.0, 0.5, 3), r),
    ):
        a = runner(rng_for(1, "run", "x", 0))
        b = runner(rng_for(1, "run", "x", 0))
        assert a.final_energy == b.final_energy
        assert a.final_e_norm == b.final_e_norm
        assert [lp.energy_star for lp in a.loops] == [lp.energy_star for lp in b.loops]


def test_hoho_survives_eigen_failure():
    from homotopy_qaoa import NumericalError
    from homotopy_qaoa.hamiltonian import ExtremeEigenSolver

    class FailingSolver(ExtremeEigenSolver):
        def extremes(self, alpha):
            if 0.0 < alpha < 1.0:
                raise NumericalError("synthetic eigen failure")
            return super().extremes(alpha)

    diag = maxcut_objective(random_instance(5, 3))
    config = HomotopyConfig(alpha_init=0.0, alpha_step=0.5, layers=2)
    rec = run_hoho(diag, config, np.random.default_rng(1),
                   eigensolver=FailingSolver(diag))
    # the failing middle loop is downgraded, the run still completes
    assert [lp.e_norm_star is None for lp in rec.loops] == [False, True, False]
    assert 0.0 <= rec.final_e_norm <= 1.0


def test_tqaoa_medians_improve_with_layers():
    # median trend over seeds, not per-seed: deeper growth never hurts the median
    at5, at20 = [], []
    for seed in range(6):
        diag = maxcut_objective(random_instance(10, 600 + seed))
        rec = run_tqaoa(
            diag, 20, InitStrategy("ZR"), OPT,
            rng_for(3, "run", "tqaoa", 10, 20, "ZR", seed), layers_start=4,
        )
        by_layers = {lp.layers: lp.e_norm_star for lp in rec.loops}
        at5.append(by_layers[5])
        at20.append(by_layers[20])
    assert np.median(at20) <= np.median(at5)


def test_zr_initial_state_is_critical_point():
    from homotopy_qaoa import gradient

    for seed in range(20):
        rng = np.random.default_rng(seed)
        diag = maxcut_objective(random_instance(4, seed))
        params = init_params(InitStrategy("ZR"), 3, rng)
        assert energy(params, 0.0, diag) == -4.0
        assert np.max(np.abs(gradient(params, 0.0, diag))) < 1e-8
