"""End-to-end evaluation of a scenario and the parameter-scaling study."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from . import detection, feedback, optics, rates, thermal
from .errors import PhysicsError, ValidationError
from .scenario import FeedbackPlan, Scenario, validate_scenario


@dataclass(frozen=True)
class PipelineResult:
    scenario: Scenario
    polarizability: optics.Polarizability
    coefficients: optics.OpticalCoefficients
    thermal: thermal.ThermalState
    rates: rates.RateSet
    critical_pressure: float
    occupations: tuple  # no-feedback closed form
    noise: detection.NoiseFloor
    feedback: feedback.FeedbackReport | None
    warnings: tuple = field(default_factory=tuple)

    @property
    def gamma_cr(self):
        return self.rates.gamma_cr


def resolve_pressure(s: Scenario, coeffs, gamma_cr):
    """Ambient pressure of the scenario; solved from Γ = ξΓ_cr when pinned."""
    g = s.gas
    if g.damping_over_critical is not None:
        return thermal.pressure_for_damping(s.particle, g, coeffs.P_a,
                                            g.damping_over_critical * gamma_cr)
    return g.ambient_pressure


def evaluate(s: Scenario, with_feedback=True, check=True) -> PipelineResult:
    """Run every stage for one scenario.

    Raises
    ------
    ValidationError
        If the scenario breaks an invariant (``check=True``).
    TrapUnstable
        If the gas damping is at or below the critical rate.
    """
    notes = []
    if check:
        report = validate_scenario(s)
        if not report.ok:
            failed = "; ".join(f"{c.name} {c.detail}".strip() for c in report.failures())
            raise ValidationError(f"invalid scenario: {failed}")
        notes.extend(report.warnings)
    p, b = s.particle, s.beam
    pol = optics.compute_polarizability(p, b)
    coeffs = optics.compute_coefficients(p, b)
    gamma_cr = rates.critical_damping(coeffs, p, b)
    pressure = resolve_pressure(s, coeffs, gamma_cr)
    th = thermal.thermal_state(p, s.gas, coeffs.P_a, pressure)
    if th.melting:
        notes.append(f"surface temperature {th.T_s:.1f} K at or above melting point "
                     f"{p.melting_point:.0f} K")
    elif th.T_s > 0.9 * p.melting_point:
        notes.append(f"surface temperature {th.T_s:.1f} K within 10% of the melting point")
    rs = rates.shot_noise_rates(coeffs, p, b, th)
    p_cr = thermal.critical_pressure(p, s.gas, coeffs.P_a, gamma_cr)
    occ = rates.steady_state_occupation(rs)
    nf = detection.noise_floors(p, b, s.detection)
    fb = None
    if with_feedback and s.feedback.scheme != "none":
        fb = feedback.occupations_with_feedback(rs, nf, s.feedback, s.solver)
        rs = dataclasses.replace(rs, linewidth=tuple(
            (rs.gamma + g) / 2.0 for g in fb.rates.gains))
        for m in fb.ledger.failures():
            notes.append(f"operating condition {m.label} margin {m.value:.3g} "
                         f"below {m.threshold:g}")
    return PipelineResult(s, pol, coeffs, th, rs, p_cr, occ, nf, fb, tuple(notes))


def with_parameter(s: Scenario, name, value) -> Scenario:
    """Copy of ``s`` with one SI parameter changed (names as in SWEEPABLE)."""
    section, key = SWEEPABLE[name]
    if section == "feedback":
        axis = int(key[-1])
        gains = list(s.feedback.gains)
        gains[axis - 1] = value
        return s.replace(feedback=dataclasses.replace(s.feedback, gains=tuple(gains)))
    if section == "gas" and key == "ambient_pressure":
        return s.replace(gas=thermal.with_pressure(s.gas, value))
    if section == "detection" and key == "effective_distance":
        det = s.detection
        lim = detection.max_allowed_geometry(s.beam, value)
        old = detection.max_allowed_geometry(s.beam, det.effective_distance)
        # keep the geometry at the same fraction of its bounds
        scale3 = lim.area_3_max / old.area_3_max
        scale_lat = lim.balanced_area / old.balanced_area
        new = dataclasses.replace(
            det, effective_distance=value, area_3=det.area_3 * scale3,
            area_1=det.area_1 * scale_lat, area_2=det.area_2 * scale_lat,
            offset_x=det.offset_x * math.sqrt(scale_lat),
            offset_y=det.offset_y * math.sqrt(scale_lat))
        return s.replace(detection=new)
    record = getattr(s, section)
    return s.replace(**{section: dataclasses.replace(record, **{key: value})})


# sweep name -> (section, field); the unit column is the default input unit
SWEEPABLE = {
    "P_L": ("beam", "mean_power"),
    "R": ("particle", "radius"),
    "NA": ("beam", "numerical_aperture"),
    "lambda": ("beam", "wavelength"),
    "asymmetry_xy": ("beam", "asymmetry_xy"),
    "P_am": ("gas", "ambient_pressure"),
    "T_am": ("gas", "ambient_temperature"),
    "accommodation": ("gas", "accommodation"),
    "xi": ("gas", "damping_over_critical"),
    "Z": ("detection", "effective_distance"),
    "gain_1": ("feedback", "gain_1"),
    "gain_2": ("feedback", "gain_2"),
    "gain_3": ("feedback", "gain_3"),
}


# --------------------------------------------------------------------------
# scaling study

@dataclass(frozen=True)
class ScalingPoint:
    value: float
    min_occupation: float
    excluded: str = ""


@dataclass(frozen=True)
class ScalingVerdict:
    parameter: str
    axis: int
    pressure_mode: str
    points: tuple

    @property
    def values(self):
        return np.array([pt.min_occupation for pt in self.points if not pt.excluded])

    @property
    def decreasing(self):
        v = self.values
        return len(v) >= 2 and bool(np.all(np.diff(v) < 0))

    @property
    def increasing(self):
        v = self.values
        return len(v) >= 2 and bool(np.all(np.diff(v) > 0))

    @property
    def verdict(self):
        return "decreasing" if self.decreasing else "increasing" if self.increasing else "mixed"


def scaling_study(s: Scenario, axis, parameter, grid, pinned_xi=None) -> ScalingVerdict:
    """Minimum Coulomb-axis occupation over a grid of P_L, R or NA.

    Thermal state and rates are recomputed at each point. With ``pinned_xi``
    the ambient pressure is re-solved at every point so that Γ = ξ·Γ_cr;
    otherwise the scenario's pressure is kept. Points that melt the particle
    are flagged and excluded.
    """
    if parameter not in ("P_L", "R", "NA"):
        raise ValidationError(f"scaling parameter must be P_L, R or NA (got {parameter})")
    base = s.replace(feedback=FeedbackPlan(scheme="hybrid", coulomb_axis=axis))
    if pinned_xi is not None:
        base = base.replace(gas=dataclasses.replace(
            base.gas, ambient_pressure=None, damping_over_critical=pinned_xi))
    elif base.gas.ambient_pressure is None:
        raise ValidationError("fixed-pressure study needs an ambient pressure")
    points = []
    for value in grid:
        point = with_parameter(base, parameter, float(value))
        try:
            res = evaluate(point, with_feedback=False)
        except PhysicsError as exc:
            points.append(ScalingPoint(float(value), math.nan, str(exc)))
            continue
        opt = feedback.optimum_coulomb_gain(res.rates, res.noise, axis)
        flag = "melting" if res.thermal.melting else ""
        points.append(ScalingPoint(float(value), opt.min_occupation, flag))
    mode = f"Γ = {pinned_xi:g}·Γ_cr" if pinned_xi is not None else "fixed pressure"
    return ScalingVerdict(parameter, axis, mode, tuple(points))
