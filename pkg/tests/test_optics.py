import math

import numpy as np
import pytest
from scipy import integrate

from levitrap import optics
from levitrap.constants import C, EPS0
from levitrap.scenario import BeamSpec, ParticleSpec


def intensity_profile(beam, x, y, z):
    """Relative intensity of a focused Gaussian beam, written out directly."""
    z0, w0 = 2.0 / (beam.k0 * beam.numerical_aperture**2), 2.0 / (beam.k0 * beam.numerical_aperture)
    w2 = w0**2 * (1 + (z / z0) ** 2)
    return w0**2 / w2 * np.exp(-2 * (x**2 + y**2) / w2)


def test_field_at_focus(baseline):
    assert optics.incident_field(baseline.beam, (0, 0, 0)) == 1 + 0j


def test_field_at_rayleigh_range(baseline):
    b = baseline.beam
    assert abs(optics.incident_field(b, (0, 0, b.rayleigh_range))) == pytest.approx(2**-0.5)


def test_field_at_waist(baseline):
    b = baseline.beam
    assert abs(optics.incident_field(b, (b.waist, 0, 0))) == pytest.approx(math.exp(-1))


def test_field_matches_direct_intensity(baseline):
    b = baseline.beam
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(50, 3)) * [b.waist, b.waist, b.rayleigh_range]
    f = optics.incident_field(b, pts)
    assert np.allclose(abs(f) ** 2, intensity_profile(b, *pts.T), rtol=1e-12)


def test_clausius_mossotti(baseline):
    pol = optics.compute_polarizability(baseline.particle, baseline.beam)
    assert pol.a == pytest.approx(1.1 / 4.1, rel=1e-14)


def test_lossless_imaginary_part(baseline):
    p = ParticleSpec(70e-9, 2200, 2.1, 0.0)
    pol = optics.compute_polarizability(p, baseline.beam)
    assert pol.exact_imag == pytest.approx(pol.alpha_I, rel=1e-6)


def test_low_loss_real_part(baseline):
    pol = optics.compute_polarizability(baseline.particle, baseline.beam)
    assert pol.exact_real == pytest.approx(pol.alpha_R, rel=1e-2)


def test_static_polarizability_scales_as_volume(baseline):
    vals = [optics.compute_polarizability(ParticleSpec(r, 2200, 2.1, 1e-5), baseline.beam)
            for r in (1e-9, 2e-9, 4e-9)]
    ratios = [v.exact_real / r**3 for v, r in zip(vals, (1e-9, 2e-9, 4e-9))]
    assert np.allclose(ratios, ratios[0], rtol=1e-9)


def test_frequency_ratio(baseline):
    c = optics.compute_coefficients(baseline.particle, baseline.beam)
    assert math.sqrt(c.A3 / c.A1) == pytest.approx(0.8 / math.sqrt(2), rel=1e-12)


def test_zero_aperture_gives_zero_coefficients(baseline):
    b = BeamSpec(1064e-9, 0.1, 0.0)
    c = optics.compute_coefficients(baseline.particle, b)
    for name in ("A1", "A2", "A3", "B", "B_prime", "C1", "C2", "C3", "P_s", "P_a"):
        assert getattr(c, name) == 0.0


def test_trap_frequency_power_scaling(baseline):
    p, b = baseline.particle, baseline.beam
    c = optics.compute_coefficients(p, b)
    om = optics.trap_frequencies(c, p, b)
    b4 = BeamSpec(b.wavelength, 4 * b.mean_power, b.numerical_aperture)
    om4 = optics.trap_frequencies(optics.compute_coefficients(p, b4), p, b4)
    assert np.allclose(np.array(om4) / np.array(om), 2.0, rtol=1e-12)
    b0 = BeamSpec(b.wavelength, 0.0, b.numerical_aperture)
    assert optics.trap_frequencies(optics.compute_coefficients(p, b0), p, b0) == (0.0, 0.0, 0.0)


def test_scattered_power_quadrature(baseline):
    """Integrate the far-field dipole pattern (dipole along x) over a sphere."""
    p, b = baseline.particle, baseline.beam
    pol = optics.compute_polarizability(p, b)
    c = optics.compute_coefficients(p, b)
    pref = abs(pol.alpha) ** 2 * b.numerical_aperture**2 * b.k0**6 * b.mean_power \
        / (32 * math.pi**3 * EPS0**2)

    def flux(theta, phi):
        sx = math.sin(theta) * math.cos(phi)
        return pref * (1 - sx**2) * math.sin(theta)

    total, _ = integrate.dblquad(flux, 0, 2 * math.pi, 0, math.pi, epsabs=0, epsrel=1e-10)
    assert c.P_s == pytest.approx(total, rel=5e-3)
    assert c.P_s_exact == pytest.approx(total, rel=1e-8)


def test_finite_difference_stiffness(baseline):
    """Curvature of -α_R|E|²/4 at the focus gives A_i·P."""
    p, b = baseline.particle, baseline.beam
    c = optics.compute_coefficients(p, b)
    alpha_R = 4 * math.pi * EPS0 * p.clausius_mossotti * p.radius**3
    e0sq = 4 * C * 4e-7 * math.pi * b.mean_power / (math.pi * (2 / (b.k0 * b.numerical_aperture)) ** 2)

    def U(x, y, z):
        return -alpha_R * e0sq * intensity_profile(b, x, y, z) / 4

    for axis, h in ((0, b.waist * 1e-3), (1, b.waist * 1e-3), (2, b.rayleigh_range * 1e-3)):
        d = np.zeros(3)
        d[axis] = h
        k = (U(*d) - 2 * U(0, 0, 0) + U(*-d)) / h**2
        assert k / b.mean_power == pytest.approx(c.A[axis], rel=1e-2)
        # the package's own potential agrees with the direct form
        kp = (optics.gradient_potential(p, b, d) - 2 * optics.gradient_potential(p, b, (0, 0, 0))
              + optics.gradient_potential(p, b, -d)) / h**2
        assert kp == pytest.approx(k, rel=1e-6)


def test_recoil_amplitudes(baseline):
    c = optics.compute_coefficients(baseline.particle, baseline.beam)
    assert c.C2 ** 2 / c.C1**2 == pytest.approx(2.0)
    assert c.B_prime / c.B > 10
