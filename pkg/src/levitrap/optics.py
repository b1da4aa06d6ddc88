"""Field profile, polarizability and optical force/power coefficients.

The beam is a linearly polarized (along x) focused Gaussian beam propagating
along z. Coefficients are returned per watt of beam power so that stiffness,
mean radiation pressure and noise amplitudes follow by multiplying with the
mean power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C, EPS0, ETA0
from .errors import ValidationError
from .scenario import BeamSpec, ParticleSpec


def incident_field(beam: BeamSpec, point) -> complex:
    """Complex amplitude of the focused beam at ``point`` relative to its
    focal value E0.

    Includes the width growth, wavefront curvature and Gouy phase. ``point``
    may be an array of shape (..., 3); the result then has shape (...).
    """
    r = np.asarray(point, dtype=float)
    x, y, z = r[..., 0], r[..., 1], r[..., 2]
    k0, z0, w0 = beam.k0, beam.rayleigh_range, beam.waist
    spread = 1.0 + (z / z0) ** 2
    rho2 = x**2 + y**2
    # curvature term k0·ρ²/(2·R(z)) with R(z) = z(1 + z0²/z²), written to stay
    # finite at z = 0
    curvature = k0 * rho2 * z / (2.0 * (z**2 + z0**2))
    phase = k0 * z + curvature - np.arctan(z / z0)
    field = np.exp(-rho2 / (w0**2 * spread) + 1j * phase) / np.sqrt(spread)
    if field.ndim == 0:
        return complex(field)
    return field


def focal_field_squared(beam: BeamSpec, power=None) -> float:
    """|E0|² (V²/m²) carried by a beam of the given power (default: mean)."""
    power = beam.mean_power if power is None else power
    return 4.0 * ETA0 * power / (math.pi * beam.waist**2)


@dataclass(frozen=True)
class Polarizability:
    alpha: complex
    alpha_R: float
    alpha_I: float
    a: float

    @property
    def exact_real(self):
        return self.alpha.real

    @property
    def exact_imag(self):
        return self.alpha.imag


def compute_polarizability(p: ParticleSpec, beam: BeamSpec) -> Polarizability:
    """Radiation-corrected dipole polarizability and its low-loss forms.

    ``alpha`` is the exact complex value; ``alpha_R``/``alpha_I`` are the
    low-loss approximations 4πε0·a·R³ and 8πε0·a²·k0³R⁶/3.
    """
    if p.eps_real <= 1.0:
        raise ValidationError(f"eps_real must exceed 1 (got {p.eps_real})")
    eps = complex(p.eps_real, p.eps_imag)
    static = 4.0 * math.pi * EPS0 * p.radius**3 * (eps - 1.0) / (eps + 2.0)
    alpha = static / (1.0 - 1j * beam.k0**3 * static / (6.0 * math.pi * EPS0))
    a = p.clausius_mossotti
    kr3 = (beam.k0 * p.radius) ** 3
    alpha_R = 4.0 * math.pi * EPS0 * a * p.radius**3
    alpha_I = 8.0 * math.pi * EPS0 * a**2 * kr3 * p.radius**3 / 3.0
    return Polarizability(alpha, alpha_R, alpha_I, a)


@dataclass(frozen=True)
class OpticalCoefficients:
    """Per-watt optical coefficients (SI).

    A1..A3 : gradient stiffness per watt, N/(W·m)
    B : mean radiation pressure per watt, N/W
    B_prime : radiation-pressure noise amplitude (force PSD = B'²·ħω0·P)
    C1..C3 : recoil noise amplitudes (force PSD = C_i²·ħω0·P)
    kz : axial wavenumber at the focus, 1/m
    P_s, P_a : scattered and absorbed power at the mean beam power, W
    P_s_exact : scattered power from the exact polarizability, W
    """

    A1: float
    A2: float
    A3: float
    B: float
    B_prime: float
    C1: float
    C2: float
    C3: float
    kz: float
    P_s: float
    P_a: float
    P_s_exact: float

    @property
    def A(self):
        return (self.A1, self.A2, self.A3)

    @property
    def C(self):
        return (self.C1, self.C2, self.C3)


def compute_coefficients(p: ParticleSpec, beam: BeamSpec) -> OpticalCoefficients:
    pol = compute_polarizability(p, beam)
    a, na, k0, R, P = pol.a, beam.numerical_aperture, beam.k0, p.radius, beam.mean_power
    kr3 = (k0 * R) ** 3
    axial = 1.0 - 0.5 * na**2

    A1 = a * na**4 * k0 * kr3 / C
    A3 = a * na**6 * k0 * kr3 / (2.0 * C)
    A2 = beam.asymmetry_xy * A1
    B = 4.0 * a**2 * axial * na**2 * kr3**2 / (3.0 * C)
    B_prime = 2.0 * a * axial * na * kr3 / (math.sqrt(3.0) * C)
    C1 = 2.0 * a * na * kr3 / (math.sqrt(15.0) * C)
    C2 = C3 = math.sqrt(2.0) * C1

    P_s = 4.0 * a**2 * na**2 * kr3**2 * P / 3.0
    P_a = 6.0 * p.eps_imag * na**2 * kr3 * P / (p.eps_real + 2.0) ** 2
    P_s_exact = abs(pol.alpha) ** 2 * na**2 * k0**6 * P / (12.0 * math.pi**2 * EPS0**2)
    return OpticalCoefficients(A1, A2, A3, B, B_prime, C1, C2, C3, beam.kz, P_s, P_a, P_s_exact)


def trap_frequencies(coeffs: OpticalCoefficients, p: ParticleSpec, beam: BeamSpec):
    """Ω_i = √(A_i·P/M) in rad/s."""
    M = p.mass
    return tuple(math.sqrt(A * beam.mean_power / M) for A in coeffs.A)


def gradient_potential(p: ParticleSpec, beam: BeamSpec, point):
    """Optical potential energy -α_R|E_inc|²/4 at ``point`` (J), low-loss α_R.

    Its negative gradient is the gradient force; near the focus it reduces to
    the harmonic spring with stiffness A_i·P.
    """
    pol = compute_polarizability(p, beam)
    intensity = np.abs(incident_field(beam, point)) ** 2 * focal_field_squared(beam)
    return -0.25 * pol.alpha_R * intensity
