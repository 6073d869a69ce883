"""Homotopy-scheduled QAOA for weighted Max-Cut on an exact state-vector simulator."""

from .exceptions import GraphParseError, NumericalError, ResourceError
from .graph import (
    WeightedGraph,
    generate_ba_graph,
    graph_hash,
    parse_graph,
    read_graph,
    serialize_graph,
    write_graph,
)
from .hamiltonian import (
    ExtremeEigenSolver,
    HomotopyHamiltonian,
    IsingDiagonal,
    apply_homotopy,
    extreme_eigenvalues,
    maxcut_objective,
    normalize_energy,
)
from .landscape import (
    CosineModel,
    CosineTerm,
    CosineVerification,
    ScanContext,
    ScanResult,
    eigenvalue_gaps,
    gaps_for_scan,
    mixer_spectrum,
    period_grid,
    scan_circuit_parameter,
    scan_parameter,
    verify_cosine_structure,
)
from .optimize import OptimizationResult, OptimizerConfig, minimize
from .simulator import (
    QaoaParams,
    apply_mixer_layer,
    apply_objective_layer,
    energy,
    energy_and_gradient,
    gradient,
    plus_state,
    prepare_state,
    state_energy,
)
from .strategies import (
    HomotopyConfig,
    InitStrategy,
    LoopRecord,
    RunRecord,
    alpha_schedule,
    extend_params,
    init_params,
    run_hoho,
    run_qaoa,
    run_tqaoa,
)
from .experiments import (
    AggregateRow,
    Cell,
    ExperimentPlan,
    aggregate,
    run_cell_sample,
    run_plan,
)

__version__ = "0.1.0"
