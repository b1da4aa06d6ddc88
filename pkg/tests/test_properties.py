"""Randomized properties (hypothesis) over admissible inputs."""

import dataclasses
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from levitrap import detection, master, optics
from levitrap.rates import LadderRates
from levitrap.report import dumps_json
from levitrap.scenario import BeamSpec, DetectionSpec, ParticleSpec

radius = st.floats(20e-9, 200e-9)
power = st.floats(0.01, 1.0)
aperture = st.floats(0.1, 0.95)
eps = st.floats(1.2, 4.0)


@given(radius, power, aperture, eps)
def test_frequency_ratio_is_aperture_over_root_two(R, P, na, e):
    c = optics.compute_coefficients(ParticleSpec(R, 2200, e, 0.0), BeamSpec(1064e-9, P, na))
    assert math.isclose(math.sqrt(c.A3 / c.A1), na / math.sqrt(2), rel_tol=1e-12)


@given(radius, power, aperture)
def test_recoil_shares(R, P, na):
    c = optics.compute_coefficients(ParticleSpec(R, 2200, 2.1, 0.0), BeamSpec(1064e-9, P, na))
    assert math.isclose(c.C2**2, 2 * c.C1**2, rel_tol=1e-12)
    assert math.isclose(c.C3, c.C2, rel_tol=1e-15)


@given(radius, power, aperture, st.floats(10, 100))
def test_noise_floor_scalings(R, P, na, zfac):
    p, b = ParticleSpec(R, 2200, 2.1, 1e-5), BeamSpec(1064e-9, P, na)
    det = DetectionSpec.at_bounds(b.wavelength, zfac * b.wavelength)
    base = np.array(detection.noise_floors(p, b, det).S)
    b2 = dataclasses.replace(b, mean_power=2 * P)
    assert np.allclose(np.array(detection.noise_floors(p, b2, det).S), base / 2, rtol=1e-12)
    p2 = dataclasses.replace(p, radius=1.5 * R)
    assert np.allclose(np.array(detection.noise_floors(p2, b, det).S), base / 1.5**6, rtol=1e-12)


@st.composite
def ladders(draw, max_ratio=0.1):
    gamma = draw(st.floats(0.1, 10.0))
    n_th = draw(st.floats(0.0, 50.0))
    gamma_r = draw(st.floats(0.0, 5.0)) * gamma
    ratio = draw(st.floats(0.0, max_ratio))
    return LadderRates.from_rates(n_th, gamma, gamma_r, ratio * gamma)


@settings(max_examples=30, deadline=None)
@given(ladders())
def test_master_equation_mean(lr):
    sol = master.master_equation_steady_state(lr)
    assert math.isclose(sol.mean, lr.mean_occupation(), rel_tol=1e-6)


@settings(max_examples=30, deadline=None)
@given(ladders(0.05), st.integers(50, 200))
def test_generator_conserves_probability(lr, n):
    Q = master.generator_dense(lr, n)
    assert np.allclose(Q.sum(axis=0), 0.0, atol=1e-9 * np.abs(Q).max())
    off = Q - np.diag(np.diag(Q))
    assert (off >= 0).all()


@given(st.dictionaries(st.text(min_size=1, max_size=5),
                       st.one_of(st.floats(allow_nan=True), st.integers(), st.booleans(),
                                 st.text(max_size=5)), max_size=6))
def test_json_encoding_deterministic(doc):
    assert dumps_json(doc) == dumps_json(dict(reversed(list(doc.items()))))
