"""Particle heating, free-molecular (Epstein) gas damping and the bath
temperature seen by the centre-of-mass motion.

The absorbed optical power is balanced by gas conduction and thermal
radiation. Gas molecules leave the surface partially accommodated, so the
damping and thermal noise split into an impinging part at the ambient
temperature and an emerging part at a higher temperature.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .constants import KB, SIGMA_SB
from .errors import ConvergenceError, ParticleOverheats, ValidationError
from .scenario import GasSpec, ParticleSpec

T_CEILING = 1.0e4


def mean_speed(temperature, molecule_mass):
    """Maxwell-Boltzmann mean speed √(8k_B·T/(π·m))."""
    return math.sqrt(8.0 * KB * temperature / (math.pi * molecule_mass))


def conduction_coefficient(p: ParticleSpec, g: GasSpec, pressure):
    """Gas conduction per kelvin of surface excess, W/K."""
    v_im = mean_speed(g.ambient_temperature, g.molecule_mass)
    gam = g.heat_capacity_ratio
    return ((gam + 1.0) * pressure * v_im / (8.0 * (gam - 1.0) * g.ambient_temperature)
            * g.accommodation * p.area)


def heat_loss(p: ParticleSpec, g: GasSpec, pressure, T_s):
    """(conducted, radiated) power in W at surface temperature ``T_s``."""
    T_am = g.ambient_temperature
    conducted = conduction_coefficient(p, g, pressure) * (T_s - T_am)
    radiated = p.emissivity * SIGMA_SB * p.area * (T_s**4 - T_am**4)
    return conducted, radiated


def solve_surface_temperature(p: ParticleSpec, g: GasSpec, absorbed, pressure=None,
                              rtol=1e-10):
    """Surface temperature balancing ``absorbed`` power against conduction and
    radiation.

    Safeguarded Newton iteration on the bracket [T_am, 1e4 K]. The loss is
    strictly increasing in T_s, so the root is unique.

    Raises
    ------
    ParticleOverheats
        If the losses at 1e4 K are still below the absorbed power.
    """
    if absorbed < 0:
        raise ValidationError("absorbed power must be non-negative")
    pressure = g.ambient_pressure if pressure is None else pressure
    T_am = g.ambient_temperature
    if absorbed == 0:
        return T_am
    h = conduction_coefficient(p, g, pressure)
    rad = p.emissivity * SIGMA_SB * p.area

    def residual(T):
        return h * (T - T_am) + rad * (T**4 - T_am**4) - absorbed

    lo, hi = T_am, T_CEILING
    if residual(hi) < 0:
        raise ParticleOverheats(
            f"particle overheats: no thermal balance below {T_CEILING:g} K "
            f"(absorbed {absorbed:.3e} W)"
        )
    # start from the radiation-only estimate, which is usually within 1e-8
    T = min(hi, (absorbed / rad + T_am**4) ** 0.25) if rad > 0 else 0.5 * (lo + hi)
    for _ in range(200):
        f = residual(T)
        if f > 0:
            hi = T
        else:
            lo = T
        step = f / (h + 4.0 * rad * T**3)
        T_new = T - step
        if not lo < T_new < hi:
            T_new = 0.5 * (lo + hi)
        if abs(T_new - T) <= rtol * T_new:
            return T_new
        T = T_new
    raise ConvergenceError("surface temperature did not converge")


@dataclass(frozen=True)
class ThermalState:
    pressure: float
    T_s: float
    T_em: float
    T_eff: float
    gamma_im: float
    gamma_em: float
    gamma: float
    v_im: float
    v_em: float
    P_cc: float
    P_rc: float
    absorbed: float
    melting: bool = False

    @property
    def conduction_fraction(self):
        total = self.P_cc + self.P_rc
        return self.P_cc / total if total > 0 else 0.0


def emerging_temperature(g: GasSpec, T_s):
    return g.ambient_temperature + g.accommodation * (T_s - g.ambient_temperature)


def epstein_damping(p: ParticleSpec, g: GasSpec, T_s, pressure=None):
    """Impinging, emerging and total damping rates (1/s)."""
    pressure = g.ambient_pressure if pressure is None else pressure
    T_am = g.ambient_temperature
    gas_density = g.molecule_mass * pressure / (KB * T_am)
    v_im = mean_speed(T_am, g.molecule_mass)
    v_em = mean_speed(emerging_temperature(g, T_s), g.molecule_mass)
    base = gas_density * p.area / p.mass
    gamma_im = base * v_im / 3.0
    gamma_em = math.pi * base * v_em / 24.0
    return gamma_im, gamma_em, gamma_im + gamma_em


def effective_temperature(gamma_im, gamma_em, T_am, T_em):
    """Damping-weighted bath temperature."""
    total = gamma_im + gamma_em
    if total <= 0:
        raise ValidationError("effective temperature needs a positive damping rate")
    return (gamma_im * T_am + gamma_em * T_em) / total


def thermal_state(p: ParticleSpec, g: GasSpec, absorbed, pressure=None) -> ThermalState:
    pressure = g.ambient_pressure if pressure is None else pressure
    T_am = g.ambient_temperature
    T_s = solve_surface_temperature(p, g, absorbed, pressure)
    T_em = emerging_temperature(g, T_s)
    g_im, g_em, gamma = epstein_damping(p, g, T_s, pressure)
    # at zero pressure the weights are in the ratio fixed by the mean speeds
    if gamma > 0:
        T_eff = effective_temperature(g_im, g_em, T_am, T_em)
    else:
        ratio = math.pi / 8.0 * math.sqrt(T_em / T_am)
        T_eff = effective_temperature(1.0, ratio, T_am, T_em)
    P_cc, P_rc = heat_loss(p, g, pressure, T_s)
    return ThermalState(
        pressure=pressure, T_s=T_s, T_em=T_em, T_eff=T_eff,
        gamma_im=g_im, gamma_em=g_em, gamma=gamma,
        v_im=mean_speed(T_am, g.molecule_mass),
        v_em=mean_speed(T_em, g.molecule_mass),
        P_cc=P_cc, P_rc=P_rc, absorbed=absorbed,
        melting=T_s >= p.melting_point,
    )


def damping_per_pascal(p: ParticleSpec, g: GasSpec, absorbed, pressure):
    """Γ(P)/P, the slope that is nearly constant at radiation-dominated T_s."""
    T_s = solve_surface_temperature(p, g, absorbed, pressure)
    return epstein_damping(p, g, T_s, 1.0)[2]


def pressure_for_damping(p: ParticleSpec, g: GasSpec, absorbed, target_gamma,
                         rtol=1e-8, max_iter=200):
    """Ambient pressure at which the Epstein rate equals ``target_gamma``.

    Fixed point P ← Γ_target/(Γ(P)/P): T_s depends on P only through the
    small conduction term, so the map is a strong contraction.
    """
    if target_gamma <= 0:
        raise ValidationError("target damping rate must be positive")
    P = target_gamma / damping_per_pascal(p, g, absorbed, 0.0)
    history = []
    for _ in range(max_iter):
        P_new = target_gamma / damping_per_pascal(p, g, absorbed, P)
        history.append(abs(P_new - P) / P_new)
        if history[-1] <= rtol:
            return P_new
        P = P_new
    raise ConvergenceError("critical pressure iteration did not converge", history)


def critical_pressure(p: ParticleSpec, g: GasSpec, absorbed, gamma_cr, rtol=1e-8):
    """Ambient pressure at which the gas damping equals the critical rate."""
    return pressure_for_damping(p, g, absorbed, gamma_cr, rtol)


def with_pressure(g: GasSpec, pressure) -> GasSpec:
    return dataclasses.replace(g, ambient_pressure=pressure, damping_over_critical=None)
