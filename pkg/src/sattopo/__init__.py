"""Satellite network topology design as Laplacian-constrained optimization.

Offline: a convex weighted least-squares problem over the polytope of
box-constrained, degree-capped graph Laplacians, solved by projected
gradient descent. Online: OGD (projection-based) and OCG (projection-free
conditional gradient) track the moving optimum as the constellation
orbits.
"""
from .core import (
    EdgeWeights,
    FeasibleSpec,
    ObjectiveParams,
    feasibility_violation,
    from_weights,
    gradient,
    is_feasible,
    linear_oracle,
    objective_value,
    pair_indices,
    project,
    to_weights,
)
from .errors import (
    ConvergenceError,
    GeometryError,
    SatTopoError,
    SolverError,
    ValidationError,
)
from .graphs import GraphMetrics, TopologyGraph, extract_graph, metrics, plus_grid
from .offline import SolveReport, kkt_residual, solve_offline
from .online import (
    Algorithm,
    OnlineState,
    RunLog,
    StepKind,
    StepSchedule,
    dynamic_regret,
    init_state,
    ocg_step,
    ogd_step,
    residual_per_entry,
    run_experiment,
)
from .scenario import (
    BodyKind,
    BodyState,
    ConstellationSpec,
    Orbit,
    Scenario,
    build_single_plane,
    build_walker_constellation,
    propagate,
)
from .visibility import (
    FovModel,
    combined_nonconnectable,
    cone_nonconnectable,
    connectivity_matrix,
    exact_blocked,
    hyperplane_nonconnectable,
    utility_matrix,
)

__version__ = "0.1.0"
