"""Position-measurement noise floors of the scattered-light detection.

The floors are white, double-sided in angular frequency (m²·s). Detection
efficiency is taken as one and the detection bandwidth as large compared
with the trap frequencies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import HBAR
from .errors import ValidationError
from .scenario import BeamSpec, DetectionSpec, ParticleSpec, paraxial_bounds

_BOUND_RTOL = 1e-9


@dataclass(frozen=True)
class NoiseFloor:
    S_n1: float
    S_n2: float
    S_n3: float
    detection: DetectionSpec

    @property
    def S(self):
        return (self.S_n1, self.S_n2, self.S_n3)


@dataclass(frozen=True)
class GeometryLimits:
    area_3_max: float
    lateral_max: float  # bound on X²·a_d1 and on Y²·a_d2
    balanced_area: float  # X² = a_d1 = λZ/(45π) saturates the lateral bound

    @property
    def as_tuple(self):
        return (self.area_3_max, self.lateral_max, self.lateral_max)


def max_allowed_geometry(beam: BeamSpec, distance) -> GeometryLimits:
    a3, lateral = paraxial_bounds(beam.wavelength, distance)
    return GeometryLimits(a3, lateral, math.sqrt(lateral))


def check_geometry(beam: BeamSpec, det: DetectionSpec):
    """Raise ValidationError naming the first violated geometry bound."""
    lam, Z = beam.wavelength, det.effective_distance
    if Z < 10 * lam * (1 - _BOUND_RTOL):
        raise ValidationError(f"far-field bound violated: Z = {Z / lam:.4g} λ0 < 10 λ0")
    lim = max_allowed_geometry(beam, Z)
    slack = 1 + _BOUND_RTOL
    if det.area_3 > lim.area_3_max * slack:
        raise ValidationError("paraxial bound violated: a_d3 > λ0·Z/(5π)")
    if det.offset_x**2 * det.area_1 > lim.lateral_max * slack:
        raise ValidationError("paraxial bound violated: X²·a_d1 > [λ0·Z/(45π)]²")
    if det.offset_y**2 * det.area_2 > lim.lateral_max * slack:
        raise ValidationError("paraxial bound violated: Y²·a_d2 > [λ0·Z/(45π)]²")
    if min(det.area_1, det.area_2, det.area_3) <= 0 or det.offset_x == 0 or det.offset_y == 0:
        raise ValidationError("detector areas and offsets must be non-zero")


def noise_floors(p: ParticleSpec, beam: BeamSpec, det: DetectionSpec) -> NoiseFloor:
    check_geometry(beam, det)
    a = p.clausius_mossotti
    k0, R, P, Z = beam.k0, p.radius, beam.mean_power, det.effective_distance
    photon = math.pi * HBAR * beam.omega0 * beam.waist**2
    common = 8.0 * a**2 * R**6 * P
    S3 = photon * beam.rayleigh_range**2 * Z**2 / (common * k0**4 * det.area_3)
    S1 = 0.5 * photon * Z**4 / (common * k0**6 * det.offset_x**2 * det.area_1)
    S2 = 0.5 * photon * Z**4 / (common * k0**6 * det.offset_y**2 * det.area_2)
    return NoiseFloor(S1, S2, S3, det)
