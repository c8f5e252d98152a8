"""Constellation generation and circular-orbit propagation.

Bodies are either satellites on circular orbits or base stations fixed on
the surface of the Earth (the working frame is Earth-centered with stations
held fixed; Earth rotation is not modeled). Base stations come first in the
id ordering, then satellites.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ValidationError

EARTH_RADIUS_KM = 6371.0
MU_EARTH_KM3S2 = 398600.4418


class BodyKind(str, Enum):
    SATELLITE = "satellite"
    BASE_STATION = "base_station"


@dataclass(frozen=True)
class Orbit:
    """Circular-orbit elements. Angles in degrees."""

    radius_km: float
    inclination_deg: float
    raan_deg: float
    anomaly0_deg: float

    def position_at(self, t: float, mu: float = MU_EARTH_KM3S2) -> np.ndarray:
        """Position (km, Earth-centered frame) after coasting for t seconds."""
        omega = math.sqrt(mu / self.radius_km**3)
        u = math.radians(self.anomaly0_deg) + omega * t
        inc = math.radians(self.inclination_deg)
        raan = math.radians(self.raan_deg)
        cu, su = math.cos(u), math.sin(u)
        ci, si = math.cos(inc), math.sin(inc)
        cr, sr = math.cos(raan), math.sin(raan)
        return self.radius_km * np.array(
            [cr * cu - sr * ci * su, sr * cu + cr * ci * su, si * su]
        )

    def period_s(self, mu: float = MU_EARTH_KM3S2) -> float:
        return 2.0 * math.pi * math.sqrt(self.radius_km**3 / mu)


@dataclass(frozen=True, eq=False)
class BodyState:
    id: int
    kind: BodyKind
    plane: int | None
    slot: int | None
    position: np.ndarray
    orbit: Orbit | None = None


@dataclass(frozen=True)
class ConstellationSpec:
    num_planes: int
    sats_per_plane: int
    altitude_km: float
    inclination_deg: float
    raan_spread_deg: float
    phase_offset_deg: float

    def validate(self) -> None:
        if self.num_planes < 1:
            raise ValidationError(f"num_planes must be >= 1, got {self.num_planes}")
        if self.sats_per_plane < 1:
            raise ValidationError(
                f"sats_per_plane must be >= 1, got {self.sats_per_plane}"
            )
        if self.altitude_km <= 0:
            raise ValidationError(f"altitude_km must be > 0, got {self.altitude_km}")


@dataclass(eq=False)
class Scenario:
    """An ordered list of bodies plus the physical constants used to build it.

    Body ids are 0..n-1 in list order; base stations occupy the leading
    contiguous block, satellites the trailing one.
    """

    bodies: list[BodyState] = field(default_factory=list)
    timestep_s: float = 10.0
    earth_radius_km: float = EARTH_RADIUS_KM
    mu_km3s2: float = MU_EARTH_KM3S2

    @property
    def n(self) -> int:
        return len(self.bodies)

    @property
    def num_planes(self) -> int:
        planes = {b.plane for b in self.bodies if b.plane is not None}
        return len(planes)

    def kinds(self) -> list[BodyKind]:
        return [b.kind for b in self.bodies]

    def satellite_mask(self) -> np.ndarray:
        return np.array([b.kind is BodyKind.SATELLITE for b in self.bodies])

    def to_json(self) -> str:
        doc = {
            "bodies": [
                {
                    "id": b.id,
                    "kind": b.kind.value,
                    "plane": b.plane,
                    "slot": b.slot,
                    "position": [float(v) for v in b.position],
                    "orbit": None
                    if b.orbit is None
                    else {
                        "radius_km": b.orbit.radius_km,
                        "inclination_deg": b.orbit.inclination_deg,
                        "raan_deg": b.orbit.raan_deg,
                        "anomaly0_deg": b.orbit.anomaly0_deg,
                    },
                }
                for b in self.bodies
            ],
            "timestep_s": self.timestep_s,
            "earth_radius_km": self.earth_radius_km,
            "mu_km3s2": self.mu_km3s2,
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        doc = json.loads(text)
        bodies = []
        for rec in doc["bodies"]:
            orbit = None
            if rec.get("orbit") is not None:
                orbit = Orbit(**rec["orbit"])
            bodies.append(
                BodyState(
                    id=int(rec["id"]),
                    kind=BodyKind(rec["kind"]),
                    plane=rec.get("plane"),
                    slot=rec.get("slot"),
                    position=np.array(rec["position"], dtype=float),
                    orbit=orbit,
                )
            )
        return cls(
            bodies=bodies,
            timestep_s=float(doc["timestep_s"]),
            earth_radius_km=float(doc["earth_radius_km"]),
            mu_km3s2=float(doc["mu_km3s2"]),
        )


def surface_position(lat_deg: float, lon_deg: float, radius_km: float = EARTH_RADIUS_KM) -> np.ndarray:
    lat = math.radians(lat_deg)
    lon = math.radians(lon_deg)
    return radius_km * np.array(
        [math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)]
    )


def _station_bodies(base_stations, start_id: int = 0) -> list[BodyState]:
    out = []
    for k, (lat, lon) in enumerate(base_stations):
        out.append(
            BodyState(
                id=start_id + k,
                kind=BodyKind.BASE_STATION,
                plane=None,
                slot=None,
                position=surface_position(lat, lon),
            )
        )
    return out


def build_walker_constellation(
    spec: ConstellationSpec,
    base_stations: list[tuple[float, float]] | None = None,
    timestep_s: float = 10.0,
) -> Scenario:
    """Evenly spaced circular planes, plus optional surface base stations.

    Planes are separated evenly over raan_spread_deg (plane q at
    q * spread / (num_planes - 1)); satellites within a plane are spaced
    360 / sats_per_plane apart, with plane q's phasing advanced by
    q * phase_offset_deg.
    """
    spec.validate()
    base_stations = base_stations or []
    bodies = _station_bodies(base_stations)
    radius = EARTH_RADIUS_KM + spec.altitude_km
    if spec.num_planes > 1:
        raan_step = spec.raan_spread_deg / (spec.num_planes - 1)
    else:
        raan_step = 0.0
    next_id = len(bodies)
    for q in range(spec.num_planes):
        for s in range(spec.sats_per_plane):
            orbit = Orbit(
                radius_km=radius,
                inclination_deg=spec.inclination_deg,
                raan_deg=q * raan_step,
                anomaly0_deg=s * 360.0 / spec.sats_per_plane
                + q * spec.phase_offset_deg,
            )
            bodies.append(
                BodyState(
                    id=next_id,
                    kind=BodyKind.SATELLITE,
                    plane=q,
                    slot=s,
                    position=orbit.position_at(0.0),
                    orbit=orbit,
                )
            )
            next_id += 1
    return Scenario(bodies=bodies, timestep_s=timestep_s)


def build_single_plane(
    n_sats: int,
    altitude_km: float,
    base_stations: list[tuple[float, float]] | None = None,
    timestep_s: float = 10.0,
) -> Scenario:
    """One equatorial circular plane with evenly spaced satellites."""
    spec = ConstellationSpec(
        num_planes=1,
        sats_per_plane=n_sats,
        altitude_km=altitude_km,
        inclination_deg=0.0,
        raan_spread_deg=0.0,
        phase_offset_deg=0.0,
    )
    return build_walker_constellation(spec, base_stations, timestep_s=timestep_s)


def propagate(scenario: Scenario, t: float) -> np.ndarray:
    """Positions of all bodies at time t (seconds), shape (n, 3), km.

    Satellites advance along their circular orbits by mean motion; base
    stations stay fixed. Pure function of (scenario, t).
    """
    if t < 0:
        raise ValidationError(f"t must be >= 0, got {t}")
    out = np.empty((scenario.n, 3))
    for i, b in enumerate(scenario.bodies):
        if b.orbit is None:
            out[i] = b.position
        else:
            out[i] = b.orbit.position_at(t, scenario.mu_km3s2)
    return out
