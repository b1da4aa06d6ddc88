"""Shot-noise transition rates and the closed-form steady-state occupation.

Power fluctuations of the trapping beam modulate the spring constant and
drive two-phonon transitions (rate Γ_g per axis); radiation-pressure and
recoil noise drive one-phonon transitions (rate Γ_r). The gas supplies the
damping Γ and thermal occupation m̄_th.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .constants import HBAR, KB
from .errors import TrapUnstable, ValidationError
from .optics import OpticalCoefficients
from .scenario import BeamSpec, ParticleSpec
from .thermal import ThermalState

AXES = (1, 2, 3)


def bose_occupation(omega, temperature):
    """Exact thermal occupation 1/(exp(ħΩ/k_BT) - 1)."""
    if omega <= 0:
        raise ValidationError("oscillation frequency must be positive")
    return 1.0 / math.expm1(HBAR * omega / (KB * temperature))


@dataclass(frozen=True)
class RateSet:
    """Per-axis rates; tuples are indexed by axis - 1."""

    omega: tuple
    n_thermal: tuple
    gamma_g: tuple
    gamma_g_spectral: tuple  # same quantity via A_i²·ħω0·P/(16M²Ω_i²)
    gamma_r: tuple
    gamma_cr: float
    gamma: float
    linewidth: tuple
    # trap data the feedback analysis needs alongside the rates
    mass: float = 0.0
    stiffness_per_watt: tuple = (0.0, 0.0, 0.0)
    pressure_per_watt: float = 0.0

    @property
    def damping_margin(self):
        return self.gamma / self.gamma_cr if self.gamma_cr > 0 else math.inf

    def with_damping(self, gamma, n_thermal=None):
        return dataclasses.replace(
            self, gamma=gamma, n_thermal=n_thermal or self.n_thermal,
            linewidth=tuple(gamma / 2.0 for _ in AXES))

    def ladder(self, axis) -> "LadderRates":
        i = axis - 1
        return LadderRates.from_rates(self.n_thermal[i], self.gamma, self.gamma_r[i],
                                      self.gamma_g[i])


@dataclass(frozen=True)
class LadderRates:
    """Rate constants of the phonon-number ladder for one axis.

    Transition propensities out of state m are up1·(m+1), down1·m,
    up2·(m+1)(m+2) and down2·m(m-1).
    """

    up1: float
    down1: float
    up2: float
    down2: float

    @classmethod
    def from_rates(cls, n_thermal, gamma, gamma_r, gamma_g):
        up1 = n_thermal * gamma + gamma_r
        return cls(up1, up1 + gamma, gamma_g, gamma_g)

    @property
    def gamma(self):
        return self.down1 - self.up1

    @property
    def stable(self):
        return self.gamma > 8.0 * self.up2

    def mean_occupation(self):
        """Stationary mean from the first-moment balance."""
        denom = self.gamma - 8.0 * self.up2
        if denom <= 0:
            raise TrapUnstable(0, self.gamma / (8.0 * self.up2))
        return (self.up1 + 4.0 * self.up2) / denom


def critical_damping(coeffs: OpticalCoefficients, p: ParticleSpec, beam: BeamSpec):
    """Γ_cr = 8·max_i Γ_g,i, independent of beam power."""
    return 8.0 * max(A * HBAR * beam.omega0 / (16.0 * p.mass) for A in coeffs.A)


def shot_noise_rates(coeffs: OpticalCoefficients, p: ParticleSpec, beam: BeamSpec,
                     thermal: ThermalState, feedback_gains=(0.0, 0.0, 0.0)) -> RateSet:
    M, P, w0 = p.mass, beam.mean_power, beam.omega0
    omega = tuple(math.sqrt(A * P / M) for A in coeffs.A)
    if min(omega) <= 0:
        raise ValidationError("trap frequencies must be positive (P > 0, NA > 0)")
    n_th = tuple(bose_occupation(om, thermal.T_eff) for om in omega)
    g_g = tuple(A * HBAR * w0 / (16.0 * M) for A in coeffs.A)
    g_g_spec = tuple(A**2 * HBAR * w0 * P / (16.0 * M**2 * om**2)
                     for A, om in zip(coeffs.A, omega))
    pressure_sq = (0.0, 0.0, coeffs.B_prime**2)
    g_r = tuple((b2 + c**2) * HBAR * w0 * P / (2.0 * HBAR * M * om)
                for b2, c, om in zip(pressure_sq, coeffs.C, omega))
    gamma = thermal.gamma
    gamma_cr = 8.0 * max(g_g)
    width = tuple((gamma + fb) / 2.0 for fb in feedback_gains)
    return RateSet(omega, n_th, g_g, g_g_spec, g_r, gamma_cr, gamma, width,
                   M, tuple(coeffs.A), coeffs.B)


def steady_state_occupation(rates: RateSet):
    """Closed-form mean phonon number per axis without feedback.

    Raises
    ------
    TrapUnstable
        If Γ ≤ 8Γ_g,i on any axis.
    """
    out = []
    for i in range(3):
        denom = rates.gamma - 8.0 * rates.gamma_g[i]
        if denom <= 0:
            raise TrapUnstable(i + 1, rates.damping_margin)
        out.append((rates.n_thermal[i] * rates.gamma + rates.gamma_r[i]
                    + 4.0 * rates.gamma_g[i]) / denom)
    return tuple(out)
