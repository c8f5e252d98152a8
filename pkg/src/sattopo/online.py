"""Online tracking of the moving optimum: OGD, OCG, residuals, and regret.

Both algorithms keep every iterate inside the feasible set K. OGD takes a
gradient step followed by a Euclidean projection; OCG is projection-free,
taking one linear-oracle call per step against an anchored-quadratic
surrogate of the accumulated losses.
"""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import core
from .core import FeasibleSpec, ObjectiveParams, gradient, objective_value, project
from .errors import ValidationError
from .offline import solve_offline
from .scenario import Scenario, propagate
from .visibility import FovModel, connectivity_matrix, utility_matrix


class Algorithm(str, Enum):
    OGD = "ogd"
    OCG = "ocg"


class StepKind(str, Enum):
    CONSTANT = "constant"
    INVERSE_SQRT = "inverse-sqrt"


@dataclass(frozen=True)
class StepSchedule:
    kind: StepKind = StepKind.CONSTANT
    eta: float = 0.05
    ocg_eta: float = 0.1
    ocg_sigma_exponent: float = 0.5

    def __post_init__(self):
        if self.eta <= 0:
            raise ValidationError(f"eta must be > 0, got {self.eta}")
        if not (0.0 < self.ocg_sigma_exponent <= 1.0):
            raise ValidationError(
                f"ocg_sigma_exponent must be in (0, 1], got {self.ocg_sigma_exponent}"
            )

    def eta_at(self, t: int) -> float:
        if self.kind is StepKind.INVERSE_SQRT:
            return self.eta / np.sqrt(t)
        return self.eta


@dataclass(frozen=True, eq=False)
class OnlineState:
    algorithm: Algorithm
    x: np.ndarray
    t: int
    x_anchor: np.ndarray | None = None  # OCG only
    grad_accum: np.ndarray | None = None  # OCG only


def init_state(algorithm: Algorithm, x0: np.ndarray) -> OnlineState:
    if algorithm is Algorithm.OCG:
        return OnlineState(
            algorithm=algorithm,
            x=x0.copy(),
            t=1,
            x_anchor=x0.copy(),
            grad_accum=np.zeros_like(x0),
        )
    return OnlineState(algorithm=algorithm, x=x0.copy(), t=1)


def ogd_step(
    state: OnlineState,
    params_t: ObjectiveParams,
    spec: FeasibleSpec,
    schedule: StepSchedule,
) -> OnlineState:
    """x_{t+1} = project(x_t - eta_t grad f_t(x_t)). One projection."""
    if state.algorithm is not Algorithm.OGD:
        raise ValidationError("ogd_step requires an OGD state")
    eta_t = schedule.eta_at(state.t)
    x_new = project(state.x - eta_t * gradient(state.x, params_t), spec)
    return OnlineState(algorithm=Algorithm.OGD, x=x_new, t=state.t + 1)


def ocg_step(
    state: OnlineState,
    params_t: ObjectiveParams,
    spec: FeasibleSpec,
    schedule: StepSchedule,
) -> OnlineState:
    """One online conditional-gradient step. One oracle call, no projection.

    Surrogate gradient D_t = ocg_eta * sum_s grad f_s(x_s) + 2 (x_t - x_1);
    v_t = argmin <D_t, X> over K; x_{t+1} = x_t + sigma_t (v_t - x_t) with
    sigma_t = min(1, t^-ocg_sigma_exponent). Iterates stay feasible as
    convex combinations of feasible points.
    """
    if state.algorithm is not Algorithm.OCG:
        raise ValidationError("ocg_step requires an OCG state")
    accum = state.grad_accum + gradient(state.x, params_t)
    d = schedule.ocg_eta * accum + 2.0 * (state.x - state.x_anchor)
    v = core.linear_oracle(d, spec)
    sigma = min(1.0, float(state.t) ** (-schedule.ocg_sigma_exponent))
    x_new = state.x + sigma * (v - state.x)
    return OnlineState(
        algorithm=Algorithm.OCG,
        x=x_new,
        t=state.t + 1,
        x_anchor=state.x_anchor,
        grad_accum=accum,
    )


def residual_per_entry(
    x_on: np.ndarray, x_off: np.ndarray, zero_tol: float = 1e-9
) -> float:
    """Squared Frobenius distance per nonzero entry of the reference.

    Denominator counts entries of x_off with magnitude above zero_tol.
    """
    if x_on.shape != x_off.shape:
        raise ValidationError(f"shape mismatch: {x_on.shape} vs {x_off.shape}")
    count = int(np.count_nonzero(np.abs(x_off) > zero_tol))
    if count == 0:
        raise ValidationError("reference matrix is all zero; residual undefined")
    diff = x_on - x_off
    return float(np.sum(diff * diff)) / count


def dynamic_regret(
    losses_player: list[float], losses_comparator: list[float]
) -> float:
    if len(losses_player) != len(losses_comparator):
        raise ValidationError("loss sequences differ in length")
    return float(np.sum(losses_player) - np.sum(losses_comparator))


@dataclass(frozen=True)
class StepRecord:
    t: int
    loss: float
    residual: float
    wall_time_s: float
    offline_objective: float


@dataclass
class RunLog:
    algorithm: Algorithm
    records: list[StepRecord] = field(default_factory=list)
    projections: int = 0
    oracle_calls: int = 0

    def losses(self) -> list[float]:
        return [r.loss for r in self.records]

    def residuals(self) -> list[float]:
        return [r.residual for r in self.records]

    def offline_losses(self) -> list[float]:
        return [r.offline_objective for r in self.records]

    def mean_wall_time_s(self) -> float:
        return float(np.mean([r.wall_time_s for r in self.records]))

    def write_csv(self, fileobj) -> None:
        writer = csv.writer(fileobj, lineterminator="\n")
        writer.writerow(["t", "loss", "residual", "wall_time_s", "offline_objective"])
        for r in self.records:
            writer.writerow(
                [r.t, repr(r.loss), repr(r.residual), repr(r.wall_time_s), repr(r.offline_objective)]
            )


_STEP_FN = {Algorithm.OGD: ogd_step, Algorithm.OCG: ocg_step}


def run_experiment(
    scenario: Scenario,
    T: int,
    algorithms: list[Algorithm],
    fov: FovModel,
    schedule: StepSchedule,
    seed: int = 0,
    *,
    lambda_sat: float = 100.0,
    lambda_bs: float = 100.0,
    bs_utility_scale: float = 100.0,
    max_isl: int = 4,
    max_bsl: int = 1,
    offline_tol: float = 1e-6,
    assert_feasible: bool = False,
) -> dict[Algorithm, RunLog]:
    """Track the moving optimum for T steps, logging against exact solves.

    At t = 0 one offline solve seeds every online algorithm. Each step
    rebuilds the problem data from propagated positions, advances every
    online algorithm by one step (timed around the step only), solves the
    offline problem to tolerance (warm-started from the previous step's
    solution, since the optimum moves slowly), and logs loss, per-entry
    residual of the produced iterate, and per-step wall time.
    Deterministic given the seed; no randomized tie-breaks exist by
    default.
    """
    if T < 1:
        raise ValidationError(f"T must be >= 1, got {T}")
    del seed  # reserved for randomized variants; all tie-breaks are deterministic
    kinds = tuple(scenario.kinds())
    spec = FeasibleSpec(n=scenario.n, kinds=kinds, max_isl=max_isl, max_bsl=max_bsl)

    def params_at(t_s: float) -> ObjectiveParams:
        pos = propagate(scenario, t_s)
        return ObjectiveParams(
            p=connectivity_matrix(pos, list(kinds), fov, scenario.earth_radius_km),
            u=utility_matrix(pos, list(kinds), bs_utility_scale),
            kinds=kinds,
            lambda_sat=lambda_sat,
            lambda_bs=lambda_bs,
        )

    report0 = solve_offline(params_at(0.0), spec, tol=offline_tol)
    states = {alg: init_state(alg, report0.x_star) for alg in algorithms}
    reference = report0.x_star
    logs = {alg: RunLog(algorithm=alg) for alg in algorithms}
    for t in range(1, T + 1):
        params_t = params_at(t * scenario.timestep_s)
        new_states = {}
        timings = {}
        losses = {}
        for alg, state in states.items():
            losses[alg] = objective_value(state.x, params_t)
            start = time.perf_counter()
            before = dict(core.CALL_COUNTS)
            new_states[alg] = _STEP_FN[alg](state, params_t, spec, schedule)
            timings[alg] = time.perf_counter() - start
            logs[alg].projections += core.CALL_COUNTS["project"] - before["project"]
            logs[alg].oracle_calls += (
                core.CALL_COUNTS["linear_oracle"] - before["linear_oracle"]
            )
            if assert_feasible and not core.is_feasible(new_states[alg].x, spec):
                raise ValidationError(f"{alg.value} iterate left K at step {t}")
        report_t = solve_offline(
            params_t, spec, tol=offline_tol, warm_start=reference
        )
        reference = report_t.x_star
        for alg in algorithms:
            logs[alg].records.append(
                StepRecord(
                    t=t,
                    loss=losses[alg],
                    residual=residual_per_entry(new_states[alg].x, report_t.x_star),
                    wall_time_s=timings[alg],
                    offline_objective=report_t.objective,
                )
            )
        states = new_states
    return logs
