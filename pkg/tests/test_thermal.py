import dataclasses
import math

import pytest

from levitrap import thermal
from levitrap.optics import compute_coefficients
from levitrap.rates import critical_damping


def absorbed(s):
    return compute_coefficients(s.particle, s.beam).P_a


def test_surface_temperature_70nm(baseline):
    T = thermal.solve_surface_temperature(baseline.particle, baseline.gas, absorbed(baseline))
    assert T == pytest.approx(1467, rel=0.02)


def test_surface_temperature_180nm(large):
    T = thermal.solve_surface_temperature(large.particle, large.gas, absorbed(large))
    assert T == pytest.approx(1857, rel=0.02)


def test_no_absorption_stays_ambient(baseline):
    T = thermal.solve_surface_temperature(baseline.particle, baseline.gas, 0.0)
    assert T == pytest.approx(baseline.gas.ambient_temperature, rel=1e-9)


def test_heat_balance_residual(baseline):
    p, g = baseline.particle, baseline.gas
    pa = absorbed(baseline)
    T = thermal.solve_surface_temperature(p, g, pa)
    assert sum(thermal.heat_loss(p, g, g.ambient_pressure, T)) == pytest.approx(pa, rel=1e-9)


def test_zero_pressure_zero_damping(baseline):
    assert thermal.epstein_damping(baseline.particle, baseline.gas, 1000.0, 0.0)[2] == 0.0


def test_equal_temperatures_ratio(baseline):
    g = baseline.gas
    im, em, _ = thermal.epstein_damping(baseline.particle, g, g.ambient_temperature)
    assert em / im == pytest.approx(math.pi / 8, rel=1e-12)


def test_damping_linear_in_pressure(baseline):
    p, g = baseline.particle, baseline.gas
    g1 = thermal.epstein_damping(p, g, 1400.0, 1e-6)[2]
    g2 = thermal.epstein_damping(p, g, 1400.0, 2e-6)[2]
    assert g2 == pytest.approx(2 * g1, rel=1e-12)


def test_effective_temperature_70nm(baseline):
    st = thermal.thermal_state(baseline.particle, baseline.gas, absorbed(baseline))
    assert st.T_eff == pytest.approx(697, rel=0.03)


def test_effective_temperature_degenerate():
    assert thermal.effective_temperature(1.0, 0.4, 300.0, 300.0) == pytest.approx(300.0)


def test_no_accommodation(baseline):
    g = dataclasses.replace(baseline.gas, accommodation=0.0)
    st = thermal.thermal_state(baseline.particle, g, absorbed(baseline))
    assert st.T_em == g.ambient_temperature
    assert st.T_eff == pytest.approx(g.ambient_temperature)


@pytest.mark.parametrize("name, ref", [("baseline", 7e-10), ("large", 2e-9)])
def test_critical_pressure(name, ref, request):
    s = request.getfixturevalue(name)
    c = compute_coefficients(s.particle, s.beam)
    gcr = critical_damping(c, s.particle, s.beam)
    assert thermal.critical_pressure(s.particle, s.gas, c.P_a, gcr) / 100 == pytest.approx(ref, rel=0.25)


def test_critical_pressure_nearly_linear(baseline):
    p, g = baseline.particle, baseline.gas
    c = compute_coefficients(p, baseline.beam)
    gcr = critical_damping(c, p, baseline.beam)
    p1 = thermal.critical_pressure(p, g, c.P_a, gcr)
    p2 = thermal.critical_pressure(p, g, c.P_a, 2 * gcr)
    assert p2 / p1 == pytest.approx(2.0, rel=1e-3)


def test_pressure_for_damping_inverts(baseline):
    p, g = baseline.particle, baseline.gas
    pa = absorbed(baseline)
    P = thermal.pressure_for_damping(p, g, pa, 3e-5)
    assert thermal.thermal_state(p, g, pa, P).gamma == pytest.approx(3e-5, rel=1e-7)
