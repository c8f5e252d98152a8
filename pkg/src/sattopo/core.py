"""Decision variable, objective, feasible set, projection, and LP oracle.

The decision variable X is an n x n weighted-Laplacian candidate: symmetric,
zero row sums, off-diagonals in [-1, 0], diagonal capped per node kind. A
point is represented as a plain numpy array; feasibility is a predicate, not
a type. The feasible set K is also parameterized by per-pair edge weights
w in [0, 1] with degree-sum caps (a fractional b-matching polytope), which
is what the exact linear-optimization oracle solves over.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .errors import ConvergenceError, SolverError, ValidationError
from .scenario import BodyKind

# Instrumentation for step-count accounting in tests and experiment summaries.
CALL_COUNTS = {"project": 0, "linear_oracle": 0}


def reset_call_counts() -> None:
    CALL_COUNTS["project"] = 0
    CALL_COUNTS["linear_oracle"] = 0


@dataclass(frozen=True, eq=False)
class FeasibleSpec:
    """Encodes the constraint set K: node kinds, degree caps, tolerance."""

    n: int
    kinds: tuple[BodyKind, ...]
    max_isl: int = 4
    max_bsl: int = 1
    tol_feas: float = 1e-6
    pinned_zero: np.ndarray | None = None  # optional hard mask: entries fixed to 0

    def __post_init__(self):
        if self.max_isl < 1 or self.max_bsl < 1:
            raise ValidationError("degree caps must be >= 1")
        if len(self.kinds) != self.n:
            raise ValidationError(f"kinds length {len(self.kinds)} != n {self.n}")

    def caps(self) -> np.ndarray:
        return np.array(
            [
                float(self.max_isl if k is BodyKind.SATELLITE else self.max_bsl)
                for k in self.kinds
            ]
        )


@dataclass(frozen=True, eq=False)
class ObjectiveParams:
    """Per-timestep problem data: target P, weights U, trace weights."""

    p: np.ndarray
    u: np.ndarray
    kinds: tuple[BodyKind, ...]
    lambda_sat: float = 100.0
    lambda_bs: float = 100.0

    def __post_init__(self):
        n = self.p.shape[0]
        if self.p.shape != (n, n) or self.u.shape != (n, n) or len(self.kinds) != n:
            raise ValidationError("P, U, and kinds disagree on node count")

    @property
    def n(self) -> int:
        return self.p.shape[0]

    def lambda_vector(self) -> np.ndarray:
        return np.array(
            [
                self.lambda_sat if k is BodyKind.SATELLITE else self.lambda_bs
                for k in self.kinds
            ]
        )


@dataclass(frozen=True, eq=False)
class EdgeWeights:
    """Upper-triangular edge weights w_{ij}, i < j, condensed row-major."""

    n: int
    w: np.ndarray


def pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def from_weights(ew: EdgeWeights) -> np.ndarray:
    """Laplacian from edge weights: x_ij = -w_ij, x_ii = sum_j w_ij."""
    iu, ju = pair_indices(ew.n)
    x = np.zeros((ew.n, ew.n))
    x[iu, ju] = -ew.w
    x[ju, iu] = -ew.w
    np.fill_diagonal(x, -x.sum(axis=1))
    return x


def to_weights(x: np.ndarray, tol: float = 1e-6) -> EdgeWeights:
    """Inverse of from_weights; requires symmetry and zero row sums."""
    n = x.shape[0]
    if np.max(np.abs(x - x.T)) > tol:
        raise ValidationError("to_weights requires a symmetric matrix")
    if np.max(np.abs(x.sum(axis=1))) > tol:
        raise ValidationError("to_weights requires zero row sums")
    iu, ju = pair_indices(n)
    return EdgeWeights(n=n, w=-x[iu, ju])


def objective_value(x: np.ndarray, params: ObjectiveParams) -> float:
    """|| (X - P) o U ||_F^2 minus the weighted trace of X."""
    if x.shape != params.p.shape:
        raise ValidationError(f"shape mismatch: {x.shape} vs {params.p.shape}")
    resid = (x - params.p) * params.u
    return float(np.sum(resid * resid) - params.lambda_vector() @ np.diagonal(x))


def gradient(x: np.ndarray, params: ObjectiveParams) -> np.ndarray:
    """Gradient of objective_value, treating all n^2 entries as free."""
    if x.shape != params.p.shape:
        raise ValidationError(f"shape mismatch: {x.shape} vs {params.p.shape}")
    g = 2.0 * params.u * params.u * (x - params.p)
    idx = np.diag_indices(params.n)
    g[idx] -= params.lambda_vector()
    return g


def feasibility_violation(x: np.ndarray, spec: FeasibleSpec) -> str | None:
    """Description of the first violated constraint, or None if feasible."""
    tol = spec.tol_feas
    n = spec.n
    if x.shape != (n, n):
        return f"shape {x.shape} != ({n}, {n})"
    asym = np.max(np.abs(x - x.T))
    if asym > tol:
        return f"symmetry violated by {asym:.3g}"
    rowsum = np.max(np.abs(x.sum(axis=1)))
    if rowsum > tol:
        return f"zero-row-sum violated by {rowsum:.3g}"
    off = ~np.eye(n, dtype=bool)
    lo = np.min(x[off], initial=0.0)
    hi = np.max(x[off], initial=0.0)
    if lo < -1.0 - tol or hi > tol:
        return f"off-diagonal box [-1, 0] violated: range [{lo:.3g}, {hi:.3g}]"
    over = np.diagonal(x) - spec.caps()
    if np.max(over, initial=0.0) > tol:
        i = int(np.argmax(over))
        return f"diagonal cap exceeded at node {i} by {over[i]:.3g}"
    if spec.pinned_zero is not None:
        pin = np.max(np.abs(x[spec.pinned_zero]), initial=0.0)
        if pin > tol:
            return f"hard-masked entry nonzero by {pin:.3g}"
    return None


def is_feasible(x: np.ndarray, spec: FeasibleSpec) -> bool:
    return feasibility_violation(x, spec) is None


def _violation_norm(x: np.ndarray, spec: FeasibleSpec) -> float:
    """Largest constraint violation magnitude (0 on feasible points)."""
    n = spec.n
    off = ~np.eye(n, dtype=bool)
    worst = max(
        np.max(np.abs(x - x.T)),
        np.max(np.abs(x.sum(axis=1))),
        np.max(-1.0 - x[off], initial=0.0),
        np.max(x[off], initial=0.0),
        np.max(np.diagonal(x) - spec.caps(), initial=0.0),
    )
    if spec.pinned_zero is not None:
        worst = max(worst, np.max(np.abs(x[spec.pinned_zero]), initial=0.0))
    return float(worst)


def _project_structure(z: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto {X : X = X^T, X 1 = 0}.

    Symmetrization commutes with double-centering, so the composition is
    the exact projector onto the intersection.
    """
    z = 0.5 * (z + z.T)
    rows = z.mean(axis=1, keepdims=True)
    total = rows.mean()
    return z - rows - rows.T + total


def project(
    y: np.ndarray,
    spec: FeasibleSpec,
    tol: float = 1e-6,
    max_iter: int = 10_000,
) -> np.ndarray:
    """Euclidean projection onto K via Dykstra's alternating projections.

    Component sets: (a) the symmetric zero-row-sum subspace, (b) the
    off-diagonal box [-1, 0], (c) the diagonal cap half-spaces, and
    optionally (d) the hard-masked-zero subspace. Terminates when
    successive sweeps differ by <= tol in Frobenius norm and the iterate
    passes is_feasible.
    """
    CALL_COUNTS["project"] += 1
    n = spec.n
    if y.shape != (n, n):
        raise ValidationError(f"shape {y.shape} != ({n}, {n})")
    caps = spec.caps()
    diag = np.diag_indices(n)
    x = np.asarray(y, dtype=float).copy()
    q_box = np.zeros_like(x)
    r_cap = np.zeros_like(x)
    for sweep in range(max_iter):
        x_prev = x
        # (a) subspace: no Dykstra correction needed for a linear subspace
        a = _project_structure(x)
        if spec.pinned_zero is not None:
            a[spec.pinned_zero] = 0.0
        # (b) off-diagonal box
        z = a + q_box
        b = np.clip(z, -1.0, 0.0)
        b[diag] = z[diag]
        q_box = z - b
        # (c) diagonal caps
        z = b + r_cap
        c = z.copy()
        c[diag] = np.minimum(z[diag], caps)
        r_cap = z - c
        x = c
        move = np.linalg.norm(x - x_prev)
        if move <= tol:
            if is_feasible(x, spec):
                return x
            # Still infeasible with tiny sweeps: bail out early when the
            # remaining sweep budget cannot plausibly close the gap at the
            # current per-sweep progress, and let callers shrink their input.
            if _violation_norm(x, spec) > move * (max_iter - sweep):
                break
    residual = float(np.linalg.norm(x - x_prev))
    raise ConvergenceError(
        f"Dykstra projection did not converge in {max_iter} iterations "
        f"(last sweep moved {residual:.3g})",
        residual=residual,
    )


def linear_oracle(g: np.ndarray, spec: FeasibleSpec) -> np.ndarray:
    """Exact minimizer of <G, X> over K.

    In edge-weight coordinates <G, X> = sum_{i<j} c_ij w_ij with
    c_ij = g_ii + g_jj - g_ij - g_ji, subject to w in [0, 1] and per-node
    degree-sum caps: a fractional b-matching LP with half-integral
    vertices, solved by dual simplex. Pairs with nonnegative cost are
    fixed to zero, and a tiny uniform cost perturbation biases ties toward
    the sparsest optimum, keeping the oracle deterministic.
    """
    CALL_COUNTS["linear_oracle"] += 1
    n = spec.n
    if g.shape != (n, n):
        raise ValidationError(f"shape {g.shape} != ({n}, {n})")
    iu, ju = pair_indices(n)
    gd = np.diagonal(g)
    cost = gd[iu] + gd[ju] - g[iu, ju] - g[ju, iu]
    tie_eps = 1e-11 * (1.0 + np.max(np.abs(cost), initial=0.0))
    cost = cost + tie_eps
    if spec.pinned_zero is not None:
        cost = np.where(spec.pinned_zero[iu, ju], np.inf, cost)
    active = np.flatnonzero(cost < 0.0)
    w = np.zeros(len(iu))
    if active.size:
        m = active.size
        rows = np.concatenate([iu[active], ju[active]])
        cols = np.concatenate([np.arange(m), np.arange(m)])
        incidence = sparse.csr_matrix(
            (np.ones(2 * m), (rows, cols)), shape=(n, m)
        )
        res = linprog(
            cost[active],
            A_ub=incidence,
            b_ub=spec.caps(),
            bounds=(0.0, 1.0),
            method="highs-ds",
        )
        if not res.success:
            raise SolverError(f"LP oracle failed: {res.message}")
        w[active] = res.x
    return from_weights(EdgeWeights(n=n, w=w))
