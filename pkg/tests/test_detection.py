import dataclasses
import math

import numpy as np
import pytest

from levitrap import detection
from levitrap.errors import ValidationError
from levitrap.scenario import BeamSpec, DetectionSpec, ParticleSpec


def floors(s, **beam):
    b = dataclasses.replace(s.beam, **beam)
    return detection.noise_floors(s.particle, b, s.detection)


def test_power_halves_floors(baseline):
    one, two = floors(baseline), floors(baseline, mean_power=2 * baseline.beam.mean_power)
    assert np.allclose(np.array(two.S) / np.array(one.S), 0.5, rtol=1e-12)


def test_radius_sixth_power(baseline):
    p2 = dataclasses.replace(baseline.particle, radius=2 * baseline.particle.radius)
    one = detection.noise_floors(baseline.particle, baseline.beam, baseline.detection)
    two = detection.noise_floors(p2, baseline.beam, baseline.detection)
    assert np.allclose(np.array(one.S) / np.array(two.S), 64.0, rtol=1e-12)


def test_axial_area_halves_floor(baseline):
    d = baseline.detection
    small = dataclasses.replace(d, area_3=d.area_3 / 2)
    a = detection.noise_floors(baseline.particle, baseline.beam, small)
    b = detection.noise_floors(baseline.particle, baseline.beam, d)
    assert b.S_n3 == pytest.approx(a.S_n3 / 2, rel=1e-12)


def test_symmetric_transverse_floors(baseline_result):
    assert baseline_result.noise.S_n1 == pytest.approx(baseline_result.noise.S_n2, rel=1e-14)


def test_axial_to_transverse_ratio(baseline):
    b, d = baseline.beam, baseline.detection
    nf = floors(baseline)
    w0, z0, Z, k0 = b.waist, b.rayleigh_range, d.effective_distance, b.k0
    expected = (w0**2 * z0**2 * Z**2 * d.offset_x**2 * d.area_1 * k0**2) / (0.5 * w0**2 * Z**4 * d.area_3)
    assert nf.S_n3 / nf.S_n1 == pytest.approx(expected, rel=1e-12)


def test_bound_values():
    b = BeamSpec(1064e-9, 0.1, 0.8)
    lim = detection.max_allowed_geometry(b, 10.64e-6)
    assert lim.area_3_max == pytest.approx(1064e-9 * 10.64e-6 / (5 * math.pi))
    assert detection.max_allowed_geometry(b, 2 * 10.64e-6).area_3_max == pytest.approx(2 * lim.area_3_max)


def test_pinned_distance_scaling():
    """log S vs log Z fits slope 1 (axial) and 2 (transverse) at pinned bounds."""
    p, b = ParticleSpec(70e-9, 2200, 2.1, 1e-5), BeamSpec(1064e-9, 0.1, 0.8)
    Z = np.array([10, 20, 40, 80]) * b.wavelength
    S = np.array([detection.noise_floors(p, b, DetectionSpec.at_bounds(b.wavelength, z)).S for z in Z])
    slope3 = np.polyfit(np.log(Z), np.log(S[:, 2]), 1)[0]
    slope1 = np.polyfit(np.log(Z), np.log(S[:, 0]), 1)[0]
    assert slope3 == pytest.approx(1.0, abs=1e-9)
    assert slope1 == pytest.approx(2.0, abs=1e-9)


def test_geometry_violation_names_bound(baseline):
    d = dataclasses.replace(baseline.detection, area_3=3 * baseline.detection.area_3)
    with pytest.raises(ValidationError, match="a_d3"):
        detection.noise_floors(baseline.particle, baseline.beam, d)
