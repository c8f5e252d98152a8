"""Field-of-view approximations and per-timestep problem data.

Two FOV tests decide which node pairs can physically connect: a hyperplane
tangent to the Earth below the observing body, and a cone with apex at the
body that is tangent to the Earth. The combined model intersects the two
non-connectable sets. Base stations get the same tests (their tangent cone
degenerates to the horizon half-space).
"""
from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import GeometryError, ValidationError
from .scenario import EARTH_RADIUS_KM, BodyKind


class FovModel(str, Enum):
    HYPERPLANE_ONLY = "h"
    HYPERPLANE_AND_CONE = "h+c"


def _check_above_surface(positions: np.ndarray, i: int, radius: float) -> float:
    norm = float(np.linalg.norm(positions[i]))
    if norm <= 1e-9:
        raise GeometryError(f"body {i} is at Earth's center")
    return norm


def hyperplane_nonconnectable(
    positions: np.ndarray, i: int, earth_radius_km: float = EARTH_RADIUS_KM
) -> set[int]:
    """Bodies strictly below the plane tangent to Earth at i's sub-point.

    The plane has normal unit(positions[i]) and offset earth_radius_km;
    j is non-connectable iff unit(x_i) . x_j < R_E.
    """
    norm_i = _check_above_surface(positions, i, earth_radius_km)
    unit_i = positions[i] / norm_i
    dots = positions @ unit_i
    out = set(np.flatnonzero(dots < earth_radius_km).tolist())
    out.discard(i)
    return out


def cone_nonconnectable(
    positions: np.ndarray, i: int, earth_radius_km: float = EARTH_RADIUS_KM
) -> set[int]:
    """Bodies inside the Earth-tangent cone with apex at body i.

    The cone half-angle alpha satisfies sin(alpha) = R_E / ||x_i||; j is
    non-connectable iff the angle between (x_j - x_i) and the nadir
    direction (-x_i) is strictly less than alpha. Implemented with dot
    products: (x_j - x_i) . (-unit(x_i)) > ||x_j - x_i|| * cos(alpha).
    """
    norm_i = _check_above_surface(positions, i, earth_radius_km)
    unit_i = positions[i] / norm_i
    sin_a = min(earth_radius_km / norm_i, 1.0)
    cos_a = np.sqrt(1.0 - sin_a * sin_a)
    rel = positions - positions[i]
    dist = np.linalg.norm(rel, axis=1)
    proj = rel @ (-unit_i)
    out = set(np.flatnonzero(proj > dist * cos_a).tolist())
    out.discard(i)
    return out


def combined_nonconnectable(
    positions: np.ndarray, i: int, earth_radius_km: float = EARTH_RADIUS_KM
) -> set[int]:
    """Intersection of the hyperplane and cone non-connectable sets."""
    return hyperplane_nonconnectable(positions, i, earth_radius_km) & cone_nonconnectable(
        positions, i, earth_radius_km
    )


def exact_blocked(
    positions: np.ndarray, i: int, j: int, earth_radius_km: float = EARTH_RADIUS_KM
) -> bool:
    """True iff the open segment i-j intersects the Earth sphere.

    Exact segment-sphere test (quadratic discriminant restricted to the
    segment parameter range); used as the oracle the FOV approximations
    are checked against.
    """
    a = positions[i]
    d = positions[j] - positions[i]
    dd = float(d @ d)
    if dd == 0.0:
        return False
    # |a + s d|^2 = R^2, s in (0, 1)
    b = float(a @ d)
    c = float(a @ a) - earth_radius_km**2
    disc = b * b - dd * c
    if disc <= 0.0:
        return False
    sq = np.sqrt(disc)
    s1 = (-b - sq) / dd
    s2 = (-b + sq) / dd
    return s1 < 1.0 and s2 > 0.0


def _nonconnectable_sets(
    positions: np.ndarray, fov: FovModel, earth_radius_km: float
) -> list[set[int]]:
    if fov is FovModel.HYPERPLANE_ONLY:
        return [
            hyperplane_nonconnectable(positions, i, earth_radius_km)
            for i in range(len(positions))
        ]
    return [
        combined_nonconnectable(positions, i, earth_radius_km)
        for i in range(len(positions))
    ]


def connectivity_matrix(
    positions: np.ndarray,
    kinds: list[BodyKind],
    fov: FovModel,
    earth_radius_km: float = EARTH_RADIUS_KM,
) -> np.ndarray:
    """Connectivity matrix P with entries in {0, -1}.

    P[i, j] = -1 iff i and j are mutually visible under the chosen FOV
    model (visibility required in both directions keeps P symmetric).
    Base stations are treated like satellites of altitude zero.
    """
    n = len(positions)
    if len(kinds) != n:
        raise ValidationError(f"kinds length {len(kinds)} != positions length {n}")
    noncon = _nonconnectable_sets(positions, fov, earth_radius_km)
    p = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if j not in noncon[i] and i not in noncon[j]:
                p[i, j] = p[j, i] = -1.0
    return p


def utility_matrix(
    positions: np.ndarray,
    kinds: list[BodyKind],
    bs_scale: float = 1.0,
) -> np.ndarray:
    """Utility matrix U: reciprocal pairwise distance, station rows scaled.

    u(i, j) = 1 / distance_km(i, j); any entry involving a base station is
    then multiplied by bs_scale. Symmetric, zero diagonal.
    """
    n = len(positions)
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    off = ~np.eye(n, dtype=bool)
    if np.any(dist[off] < 1e-9):
        bad = np.argwhere((dist < 1e-9) & off)[0]
        raise GeometryError(f"bodies {bad[0]} and {bad[1]} are coincident")
    u = np.zeros((n, n))
    u[off] = 1.0 / dist[off]
    is_bs = np.array([k is BodyKind.BASE_STATION for k in kinds])
    scale_mask = is_bs[:, None] | is_bs[None, :]
    u[scale_mask & off] *= bs_scale
    return u
