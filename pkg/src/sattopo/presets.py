"""Shipped scenario presets for the two reference experiments."""
from __future__ import annotations

from .errors import ValidationError
from .scenario import ConstellationSpec, Scenario, build_single_plane, build_walker_constellation

# Iridium-like plane structure (66 satellites, 6 planes spanning 180 deg
# of right ascension with a counter-rotating seam between the first and
# last plane) at a raised altitude: below roughly 1100 km the horizon-plane
# field-of-view model cannot even see the in-plane ring neighbors, so the
# visibility graph disconnects and no topology can bridge it. 5000 km keeps
# every near-neighbor link inside both field-of-view models.
IRIDIUM66 = "iridium66"
PLANE18BS2 = "plane18bs2"

PRESET_NAMES = (IRIDIUM66, PLANE18BS2)

# Recommended run settings per preset. The trace weight is deliberately at
# the scale of the squared utilities (1/km^2 for thousand-km links): it then
# breaks ties toward more connectivity without drowning the fit term, which
# a weight of O(1) would (every degree cap saturates and occluded pairs get
# picked up purely for their diagonal contribution). The online step sizes
# likewise scale with the squared utilities: the gradient has magnitude
# O(u_max^2), so eta near 1/(2 u_max^2) moves iterates at O(1), and the
# conditional-gradient surrogate needs its gradient accumulator boosted to
# the same scale before it can outweigh the O(1) anchor term.
PRESET_RUN_DEFAULTS: dict[str, dict] = {
    IRIDIUM66: {"lambda_sat": 1e-9, "lambda_bs": 1e-9},
    PLANE18BS2: {
        "lambda_sat": 1e-9,
        "lambda_bs": 1e-9,
        "bs_utility_scale": 10.0,
        "eta": 400.0,
        "ocg_eta": 10_000.0,
    },
}


def build_preset(name: str, timestep_s: float = 10.0) -> Scenario:
    if name == IRIDIUM66:
        spec = ConstellationSpec(
            num_planes=6,
            sats_per_plane=11,
            altitude_km=5000.0,
            inclination_deg=86.4,
            raan_spread_deg=180.0,
            phase_offset_deg=8.0,
        )
        return build_walker_constellation(spec, base_stations=[], timestep_s=timestep_s)
    if name == PLANE18BS2:
        return build_single_plane(
            18,
            780.0,
            base_stations=[(0.0, 0.0), (0.0, 180.0)],
            timestep_s=timestep_s,
        )
    raise ValidationError(f"unknown preset {name!r}; choices: {', '.join(PRESET_NAMES)}")
