"""End-to-end optimization strategies: plain, layer-growing, and homotopy runs.

Strategy tags used throughout the harness and the CSV outputs:

* ``qaoa``  - one optimization of the target energy (alpha = 1);
* ``tqaoa`` - layer-growing runs that re-optimize after extending the
  previous optimum by one (random gamma, zero beta) pair;
* ``hoho``  - homotopy runs that sweep alpha from alpha_init to 1, each loop
  warm-started from the previous loop's optimum.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NumericalError
from .hamiltonian import ExtremeEigenSolver, IsingDiagonal, normalize_energy
from .optimize import OptimizationResult, OptimizerConfig, minimize
from .simulator import QaoaParams, energy, energy_and_gradient

TWO_PI = 2.0 * np.pi

INIT_KINDS = ("RR", "NZR", "ZR")
STRATEGY_TAGS = ("qaoa", "tqaoa", "hoho")

# alpha values within this distance of 1.0 are treated as the final loop
_SCHEDULE_EPS = 1e-12


@dataclass(frozen=True)
class InitStrategy:
    """How the initial angle vectors are drawn.

    RR draws both vectors from U(0, 2pi); NZR draws the objective angles from
    U(0, near_zero_width) instead; ZR pins the objective angles to exactly 0
    so the circuit starts in the mixer ground state.
    """

    kind: str = "ZR"
    near_zero_width: float = 0.05

    def __post_init__(self):
        if self.kind not in INIT_KINDS:
            raise ValueError(f"init kind must be one of {INIT_KINDS}, got {self.kind!r}")
        if self.kind == "NZR" and not self.near_zero_width > 0:
            raise ValueError("NZR width must be positive")


def init_params(strategy: InitStrategy, layers: int, rng: np.random.Generator) -> QaoaParams:
    """Draw initial angles; objective angles first, then mixer angles."""
    if layers < 1:
        raise ValueError("at least one layer is required")
    if strategy.kind == "RR":
        gammas = rng.uniform(0.0, TWO_PI, layers)
    elif strategy.kind == "NZR":
        gammas = rng.uniform(0.0, strategy.near_zero_width, layers)
    else:  # ZR
        gammas = np.zeros(layers)
    betas = rng.uniform(0.0, TWO_PI, layers)
    return QaoaParams(gammas=gammas, betas=betas)


@dataclass(frozen=True)
class HomotopyConfig:
    alpha_init: float
    alpha_step: float
    layers: int
    init: InitStrategy = InitStrategy("ZR")
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        if not 0.0 <= self.alpha_init <= 1.0:
            raise ValueError(f"alpha_init must lie in [0, 1], got {self.alpha_init}")
        if not 0.0 < self.alpha_step <= 1.0:
            raise ValueError(f"alpha_step must lie in (0, 1], got {self.alpha_step}")
        if self.layers < 1:
            raise ValueError("at least one layer is required")


def alpha_schedule(alpha_init: float, alpha_step: float) -> list[float]:
    """alpha_init, alpha_init + step, ... with the final loop clamped to 1.0."""
    if not 0.0 <= alpha_init <= 1.0:
        raise ValueError(f"alpha_init must lie in [0, 1], got {alpha_init}")
    if not 0.0 < alpha_step <= 1.0:
        raise ValueError(f"alpha_step must lie in (0, 1], got {alpha_step}")
    alphas = []
    k = 0
    while True:
        a = alpha_init + k * alpha_step  # no accumulation drift
        if a >= 1.0 - _SCHEDULE_EPS:
            break
        alphas.append(a)
        k += 1
    alphas.append(1.0)
    return alphas


@dataclass(frozen=True)
class LoopRecord:
    """One inner optimization: its observable, depth, and outcome."""

    alpha: float
    layers: int
    energy_star: float
    e_norm_star: float | None
    iterations: int


@dataclass
class RunRecord:
    strategy: str
    n: int
    layers: int
    init_kind: str
    alpha_init: float | None
    alpha_step: float | None
    instance_hash: str
    seed: int
    loops: list[LoopRecord]
    params_star: QaoaParams
    final_energy: float
    final_e_norm: float
    wall_time_ms: float

    @property
    def iterations_total(self) -> int:
        return sum(loop.iterations for loop in self.loops)


def _minimize_energy(
    diag: IsingDiagonal, alpha: float, start: QaoaParams, cfg: OptimizerConfig
) -> OptimizationResult:
    def f(x):
        return energy_and_gradient(QaoaParams.from_flat(x), alpha, diag)

    return minimize(f, start.flatten(), cfg)


def run_qaoa(
    diag: IsingDiagonal,
    layers: int,
    init: InitStrategy,
    cfg: OptimizerConfig,
    rng: np.random.Generator,
    instance_hash: str = "",
    seed: int = 0,
) -> RunRecord:
    """Single optimization of the target energy E_1 from a fresh draw."""
    t0 = time.perf_counter()
    result = _minimize_energy(diag, 1.0, init_params(init, layers, rng), cfg)
    e_norm = normalize_energy(result.energy_star, diag.emin, diag.emax)
    loops = [LoopRecord(1.0, layers, result.energy_star, e_norm, result.iterations)]
    return RunRecord(
        strategy="qaoa",
        n=diag.n,
        layers=layers,
        init_kind=init.kind,
        alpha_init=None,
        alpha_step=None,
        instance_hash=instance_hash,
        seed=seed,
        loops=loops,
        params_star=QaoaParams.from_flat(result.params_star),
        final_energy=result.energy_star,
        final_e_norm=e_norm,
        wall_time_ms=1e3 * (time.perf_counter() - t0),
    )


def extend_params(params: QaoaParams, rng: np.random.Generator) -> QaoaParams:
    """Append one layer: a fresh U(0, 2pi) objective angle and a zero mixer angle."""
    return QaoaParams(
        gammas=np.append(params.gammas, rng.uniform(0.0, TWO_PI)),
        betas=np.append(params.betas, 0.0),
    )


def run_tqaoa(
    diag: IsingDiagonal,
    layers_final: int,
    init: InitStrategy,
    cfg: OptimizerConfig,
    rng: np.random.Generator,
    layers_start: int = 4,
    instance_hash: str = "",
    seed: int = 0,
) -> RunRecord:
    """Layer-growing runs from ``layers_start`` up to ``layers_final``.

    Each growth step re-optimizes the target energy from the previous
    optimum extended by one (random gamma, zero beta) pair; only the
    appended entries are new, earlier angles carry over unchanged.
    """
    if not layers_final >= layers_start >= 1:
        raise ValueError(
            f"need layers_final >= layers_start >= 1, got {layers_final} < {layers_start}"
        )
    t0 = time.perf_counter()
    params = init_params(init, layers_start, rng)
    loops = []
    for layers in range(layers_start, layers_final + 1):
        if layers > layers_start:
            params = extend_params(params, rng)
        result = _minimize_energy(diag, 1.0, params, cfg)
        params = QaoaParams.from_flat(result.params_star)
        loops.append(
            LoopRecord(
                1.0,
                layers,
                result.energy_star,
                normalize_energy(result.energy_star, diag.emin, diag.emax),
                result.iterations,
            )
        )
    return RunRecord(
        strategy="tqaoa",
        n=diag.n,
        layers=layers_final,
        init_kind=init.kind,
        alpha_init=None,
        alpha_step=None,
        instance_hash=instance_hash,
        seed=seed,
        loops=loops,
        params_star=params,
        final_energy=loops[-1].energy_star,
        final_e_norm=loops[-1].e_norm_star,
        wall_time_ms=1e3 * (time.perf_counter() - t0),
    )


def run_hoho(
    diag: IsingDiagonal,
    config: HomotopyConfig,
    rng: np.random.Generator,
    instance_hash: str = "",
    seed: int = 0,
    eigensolver: ExtremeEigenSolver | None = None,
) -> RunRecord:
    """Homotopy run: one optimization loop per alpha, warm-started throughout.

    Loop energies are reported on the loop's own normalization window
    (min/max of H(alpha)); the final value is recomputed from scratch against
    the alpha=1 window.  A failed eigenvalue solve downgrades that loop's
    normalized energy to None instead of aborting the run.
    """
    t0 = time.perf_counter()
    solver = eigensolver if eigensolver is not None else ExtremeEigenSolver(diag)
    params = init_params(config.init, config.layers, rng)
    loops = []
    for alpha in alpha_schedule(config.alpha_init, config.alpha_step):
        result = _minimize_energy(diag, alpha, params, config.optimizer)
        params = QaoaParams.from_flat(result.params_star)
        try:
            lo, hi = solver.extremes(alpha)
            e_norm = normalize_energy(result.energy_star, lo, hi)
        except NumericalError:
            e_norm = None
        loops.append(LoopRecord(alpha, config.layers, result.energy_star, e_norm, result.iterations))

    final_energy = energy(params, 1.0, diag)  # recomputed, no stale cache
    return RunRecord(
        strategy="hoho",
        n=diag.n,
        layers=config.layers,
        init_kind=config.init.kind,
        alpha_init=config.alpha_init,
        alpha_step=config.alpha_step,
        instance_hash=instance_hash,
        seed=seed,
        loops=loops,
        params_star=params,
        final_energy=final_energy,
        final_e_norm=normalize_energy(final_energy, diag.emin, diag.emax),
        wall_time_ms=1e3 * (time.perf_counter() - t0),
    )
