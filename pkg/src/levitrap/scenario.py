"""Input records for a levitated-particle scenario, validation and config I/O.

All records are frozen dataclasses holding SI values. Scenario files are JSON
documents with sections ``particle``, ``beam``, ``gas``, ``detection`` and the
optional ``feedback`` and ``solver``. Any numeric key may carry a companion
``<key>_unit`` entry, e.g. ``"radius": 70, "radius_unit": "nm"``.
"""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .constants import C
from .errors import ConfigError
from .units import to_si

# comparison slack for geometry bounds that are usually set exactly at the limit
_BOUND_RTOL = 1e-9


@dataclass(frozen=True)
class ParticleSpec:
    radius: float
    mass_density: float
    eps_real: float
    eps_imag: float = 0.0
    emissivity: float = 1.0
    melting_point: float = 1873.0

    @property
    def volume(self):
        return 4.0 / 3.0 * math.pi * self.radius**3

    @property
    def mass(self):
        return self.mass_density * self.volume

    @property
    def area(self):
        return 4.0 * math.pi * self.radius**2

    @property
    def clausius_mossotti(self):
        """Real Clausius-Mossotti factor a = (ε_R - 1)/(ε_R + 2)."""
        return (self.eps_real - 1.0) / (self.eps_real + 2.0)


@dataclass(frozen=True)
class BeamSpec:
    wavelength: float
    mean_power: float
    numerical_aperture: float
    asymmetry_xy: float = 1.0

    @property
    def k0(self):
        return 2.0 * math.pi / self.wavelength

    @property
    def omega0(self):
        return self.k0 * C

    @property
    def rayleigh_range(self):
        return 2.0 / (self.k0 * self.numerical_aperture**2)

    @property
    def waist(self):
        return 2.0 / (self.k0 * self.numerical_aperture)

    @property
    def kz(self):
        """Axial wavenumber at the focus, k0 - 1/z0."""
        return self.k0 * (1.0 - 0.5 * self.numerical_aperture**2)


# Air near room temperature. The accommodation default is calibrated so that
# the effective bath temperature of the 70 nm fused-silica reference case
# comes out at ~697 K; see README.
AIR_MOLECULE_MASS = 4.81e-26
AIR_GAMMA = 1.4
DEFAULT_ACCOMMODATION = 0.777


@dataclass(frozen=True)
class GasSpec:
    ambient_pressure: Optional[float] = None
    ambient_temperature: float = 300.0
    molecule_mass: float = AIR_MOLECULE_MASS
    heat_capacity_ratio: float = AIR_GAMMA
    accommodation: float = DEFAULT_ACCOMMODATION
    # when set, the pressure is solved so that Γ equals this multiple of Γ_cr
    damping_over_critical: Optional[float] = None


def paraxial_bounds(wavelength, distance):
    """Largest a_d3 and X²·a_d1 (= Y²·a_d2) compatible with the paraxial limit."""
    a3 = wavelength * distance / (5.0 * math.pi)
    lateral = (wavelength * distance / (45.0 * math.pi)) ** 2
    return a3, lateral


@dataclass(frozen=True)
class DetectionSpec:
    effective_distance: float
    area_1: float
    area_2: float
    area_3: float
    offset_x: float
    offset_y: float
    filtered: bool = True

    @classmethod
    def at_bounds(cls, wavelength, distance, filtered=True):
        """Detector geometry with every area at its paraxial maximum and
        X² = a_d1, Y² = a_d2 (the balanced choice)."""
        a3, _ = paraxial_bounds(wavelength, distance)
        balanced = wavelength * distance / (45.0 * math.pi)
        side = math.sqrt(balanced)
        return cls(distance, balanced, balanced, a3, side, side, filtered)


SCHEMES = ("none", "parametric", "hybrid")


@dataclass(frozen=True)
class FeedbackPlan:
    """Feedback configuration.

    Gains are resolved per axis in the order: explicit gain, then
    ``critical_fraction`` (Γ_fb³ = fraction·Γ_fb,cr³, axes with a finite
    critical value), then ``optimum_fraction`` (Γ_fb,k = fraction·Γ_fb,opt,k,
    Coulomb axis only). Axes left without a rule get zero gain.
    """

    scheme: str = "none"
    coulomb_axis: int = 3
    gains: tuple = (None, None, None)
    critical_fraction: Optional[float] = None
    optimum_fraction: Optional[float] = None


@dataclass(frozen=True)
class SolverSettings:
    tolerance: float = 1e-10
    max_iterations: int = 10_000
    damping: float = 0.5
    strict: bool = False
    threshold: float = 10.0
    thresholds: dict = field(default_factory=dict)
    n_max: Optional[int] = None

    def threshold_for(self, condition):
        return float(self.thresholds.get(condition, self.threshold))


@dataclass(frozen=True)
class Scenario:
    particle: ParticleSpec
    beam: BeamSpec
    gas: GasSpec
    detection: DetectionSpec
    feedback: FeedbackPlan = FeedbackPlan()
    solver: SolverSettings = SolverSettings()
    name: str = ""

    def replace(self, **sections):
        return dataclasses.replace(self, **sections)


# --------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple
    warnings: tuple

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]


def _le(x, bound):
    return x <= bound * (1.0 + _BOUND_RTOL)


def validate_scenario(s: Scenario) -> ValidationReport:
    """Check every record invariant. Never raises; the caller decides."""
    p, b, g, d, fb = s.particle, s.beam, s.gas, s.detection, s.feedback
    checks = []
    notes = []

    def check(name, ok, detail=""):
        checks.append(Check(name, bool(ok), detail))

    check("particle.radius>0", p.radius > 0, f"R={p.radius:g} m")
    check("particle.mass_density>0", p.mass_density > 0)
    check("particle.eps_real>1", p.eps_real > 1)
    check("particle.eps_imag>=0", p.eps_imag >= 0)
    check("particle.0<emissivity<=1", 0 < p.emissivity <= 1)
    if p.eps_real > 0 and p.eps_imag / p.eps_real > 1e-2:
        notes.append(
            f"low-loss approximation questionable: ε_I/ε_R = {p.eps_imag / p.eps_real:.3g}"
        )

    check("beam.wavelength>0", b.wavelength > 0)
    check("beam.mean_power>=0", b.mean_power >= 0)
    check("beam.0<NA<1", 0 < b.numerical_aperture < 1, f"NA={b.numerical_aperture:g}")
    check("beam.asymmetry_xy>0", b.asymmetry_xy > 0)
    if b.asymmetry_xy == 1.0:
        notes.append("asymmetry_xy = 1: Ω1 = Ω2 exactly (degenerate transverse modes)")

    pressure_given = g.ambient_pressure is not None
    pinned = g.damping_over_critical is not None
    check("gas.pressure_xor_pinned", pressure_given != pinned,
          "set exactly one of ambient_pressure / damping_over_critical")
    if pressure_given:
        check("gas.ambient_pressure>=0", g.ambient_pressure >= 0)
    if pinned:
        check("gas.damping_over_critical>0", g.damping_over_critical > 0)
    check("gas.ambient_temperature>0", g.ambient_temperature > 0)
    check("gas.molecule_mass>0", g.molecule_mass > 0)
    check("gas.heat_capacity_ratio>1", g.heat_capacity_ratio > 1)
    check("gas.0<=accommodation<=1", 0 <= g.accommodation <= 1)

    if b.wavelength > 0:
        lam, Z = b.wavelength, d.effective_distance
        check("detection.far_field Z>=10λ0", Z >= 10 * lam * (1 - _BOUND_RTOL),
              f"Z/λ0 = {Z / lam:.4g}")
        a3_max, lat_max = paraxial_bounds(lam, Z)
        check("detection.paraxial a_d3", _le(d.area_3, a3_max),
              f"a_d3/max = {d.area_3 / a3_max:.4g}")
        check("detection.paraxial X²a_d1", _le(d.offset_x**2 * d.area_1, lat_max),
              f"ratio = {d.offset_x**2 * d.area_1 / lat_max:.4g}")
        check("detection.paraxial Y²a_d2", _le(d.offset_y**2 * d.area_2, lat_max),
              f"ratio = {d.offset_y**2 * d.area_2 / lat_max:.4g}")
        check("detection.positive", min(d.area_1, d.area_2, d.area_3) > 0
              and d.offset_x != 0 and d.offset_y != 0)
        if math.isclose(d.area_3, a3_max, rel_tol=1e-6):
            notes.append("detection area a_d3 sits at its paraxial limit")

    check("feedback.scheme", fb.scheme in SCHEMES, fb.scheme)
    check("feedback.coulomb_axis", fb.coulomb_axis in (1, 2, 3))
    check("feedback.gains>=0", all(x is None or x >= 0 for x in fb.gains))
    for key in ("critical_fraction", "optimum_fraction"):
        val = getattr(fb, key)
        if val is not None:
            check(f"feedback.0<{key}<1" if key == "critical_fraction" else f"feedback.{key}>0",
                  0 < val < 1 if key == "critical_fraction" else val > 0)

    sv = s.solver
    check("solver.tolerance>0", sv.tolerance > 0)
    check("solver.0<damping<=1", 0 < sv.damping <= 1)
    check("solver.max_iterations>0", sv.max_iterations > 0)
    return ValidationReport(tuple(checks), tuple(notes))


# --------------------------------------------------------------------------
# config files

_SECTION_TYPES = {
    "particle": ParticleSpec,
    "beam": BeamSpec,
    "gas": GasSpec,
    "detection": DetectionSpec,
    "feedback": FeedbackPlan,
    "solver": SolverSettings,
}
_INTEGER = {"max_iterations", "n_max"}
_NON_NUMERIC = {"filtered", "scheme", "strict", "thresholds", "gains", "pinned", "coulomb_axis"}


def _read_section(name, raw, extra=()):
    cls = _SECTION_TYPES[name]
    allowed = {f.name for f in dataclasses.fields(cls)} | set(extra)
    out = {}
    for key, value in raw.items():
        if key.endswith("_unit"):
            base = key[: -len("_unit")]
            if base not in allowed:
                raise ConfigError(f"{name}: unit given for unknown key {base!r}")
            continue
        if key not in allowed:
            raise ConfigError(f"{name}: unknown key {key!r}")
        unit = raw.get(key + "_unit")
        if key == "gains":
            if len(value) != 3:
                raise ConfigError("feedback.gains must have three entries")
            value = tuple(None if v is None else to_si(v, unit or "rad/s") for v in value)
        elif key not in _NON_NUMERIC and value is not None:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"{name}.{key}: expected a number, got {value!r}")
            value = to_si(value, unit or "")
            if key in _INTEGER:
                if value != int(value):
                    raise ConfigError(f"{name}.{key}: expected an integer")
                value = int(value)
        elif unit is not None:
            raise ConfigError(f"{name}.{key} takes no unit")
        out[key] = value
    return out


def scenario_from_dict(doc, name=""):
    if not isinstance(doc, dict):
        raise ConfigError("scenario document must be a JSON object")
    unknown = set(doc) - set(_SECTION_TYPES) - {"name"}
    if unknown:
        raise ConfigError(f"unknown top-level section(s): {sorted(unknown)}")
    for required in ("particle", "beam", "gas", "detection"):
        if required not in doc:
            raise ConfigError(f"missing section {required!r}")
    try:
        particle = ParticleSpec(**_read_section("particle", doc["particle"]))
        beam = BeamSpec(**_read_section("beam", doc["beam"]))
        gas = GasSpec(**_read_section("gas", doc["gas"]))
        det = _read_section("detection", doc["detection"], extra=("pinned",))
        pinned = det.pop("pinned", False)
        if pinned:
            geometry = set(det) - {"effective_distance", "filtered"}
            if geometry:
                raise ConfigError(f"detection: pinned geometry excludes {sorted(geometry)}")
            detection = DetectionSpec.at_bounds(
                beam.wavelength, det["effective_distance"], det.get("filtered", True)
            )
        else:
            detection = DetectionSpec(**det)
        feedback = FeedbackPlan(**_read_section("feedback", doc.get("feedback", {})))
        solver = SolverSettings(**_read_section("solver", doc.get("solver", {})))
    except TypeError as exc:  # missing required field
        raise ConfigError(str(exc)) from None
    return Scenario(particle, beam, gas, detection, feedback, solver,
                    name=doc.get("name", name))


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from None
    return scenario_from_dict(doc, name=path.stem)


def scenario_to_dict(s: Scenario):
    """SI echo of a scenario; round-trips through :func:`scenario_from_dict`."""
    doc = {"name": s.name}
    for section in ("particle", "beam", "gas", "detection", "feedback", "solver"):
        values = dataclasses.asdict(getattr(s, section))
        if section == "feedback":
            values["gains"] = list(values["gains"])
        doc[section] = values
    return doc


FIXTURES = ("baseline_70nm", "large_180nm")


def fixture(name) -> Scenario:
    """Built-in reference scenarios (fused silica, 1064 nm, 100 mW, NA 0.8)."""
    if name not in FIXTURES:
        raise ConfigError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    text = resources.files("levitrap").joinpath("fixtures").joinpath(f"{name}.json").read_text("utf-8")
    return scenario_from_dict(json.loads(text), name=name)


def warn_if_degenerate(s: Scenario):
    if s.beam.asymmetry_xy == 1.0:
        warnings.warn("Ω1 = Ω2: transverse modes are degenerate", stacklevel=2)
