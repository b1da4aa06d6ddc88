import math

import numpy as np
import pytest
from scipy import stats

from levitrap.errors import UndersampledError, ValidationError
from levitrap.oracle import photons, rng_for, seed_sequence
from levitrap.oracle.dump import HEADER, read_dump, write_dump
from levitrap.oracle.psd import Binning, averaged_periodogram, estimate_psd, impulse_train_psd
from levitrap.oracle.ssa import ssa_fock_trajectory
from levitrap.oracle.suite import OracleCheck, psd_suite, scaled_ladder
from levitrap.rates import LadderRates


def zenith_cdf_inverse(u):
    """Closed-form root of ½ - ¾cosθ + ¼cos³θ = u on [0, π]."""
    c = 2 * np.cos((np.arccos(2 * np.asarray(u) - 1) - 2 * np.pi) / 3)
    return np.arccos(np.clip(c, -1, 1))


def test_zenith_sampler_matches_inverse():
    u = np.linspace(1e-6, 1 - 1e-6, 2001)
    assert np.allclose(photons.sample_zenith(u), zenith_cdf_inverse(u), atol=1e-6)


def test_zenith_sampler_ks():
    theta = photons.sample_zenith(rng_for(11, "directions").random(200_000))
    res = stats.kstest(theta, photons.zenith_cdf)
    assert res.pvalue > 1e-3


@pytest.fixture(scope="module")
def streams(baseline_result):
    c, b = baseline_result.coefficients, baseline_result.scenario.beam
    return photons.simulate_photon_streams(c, b, photons.duration_for_events(c, b, 1e6), seed=7)


def test_poisson_counts(streams):
    for s in streams:
        expected = s.rate * s.duration
        assert abs(s.count - expected) < 4 * math.sqrt(expected)


def test_events_sorted_and_in_window(streams):
    for s in streams:
        assert np.all(np.diff(s.times) >= 0)
        assert s.times[0] >= 0 and s.times[-1] <= s.duration


def test_angular_moments(streams, baseline_result):
    k0 = baseline_result.scenario.beam.k0
    mean, mean_se, sq, sq_se = photons.angular_moments(streams[0], k0)
    for i, share in enumerate((0.2, 0.4, 0.4)):
        assert abs(sq[i] / k0**2 - share) < 3 * sq_se[i] / k0**2
        assert abs(mean[i]) < 3 * mean_se[i]


def test_absorbed_photons_have_no_direction(streams):
    with pytest.raises(ValidationError):
        streams[1].final_wavevectors(1.0)


def test_undersampled_raises(baseline_result):
    c, b = baseline_result.coefficients, baseline_result.scenario.beam
    with pytest.raises(UndersampledError):
        photons.simulate_photon_streams(c, b, 1e-12, seed=0)


def test_reproducible_streams(baseline_result):
    c, b = baseline_result.coefficients, baseline_result.scenario.beam
    d = photons.duration_for_events(c, b, 2e5)
    one = photons.simulate_photon_streams(c, b, d, seed=3)
    two = photons.simulate_photon_streams(c, b, d, seed=3)
    other = photons.simulate_photon_streams(c, b, d, seed=4)
    assert np.array_equal(one[0].times, two[0].times)
    assert np.array_equal(one[0].theta, two[0].theta)
    assert not np.array_equal(one[0].times[:100], other[0].times[:100])


def test_seed_streams_independent():
    a = seed_sequence(5, "scatter").generate_state(4)
    b = seed_sequence(5, "absorb").generate_state(4)
    assert not np.array_equal(a, b)


def test_white_noise_calibration():
    """Unit-variance white samples at spacing dt have density dt (S = ∫C(τ)e^{iωτ}dτ)."""
    dt = 1e-3
    series = rng_for(1, "calibration").normal(size=64 * 1024)
    est = estimate_psd(series, Binning(dt, 1024, 64))
    assert est.floor == pytest.approx(dt, rel=0.02)


def test_poisson_train_calibration():
    """A Poisson train of unit kicks at rate λ has white density λ."""
    rate, duration = 2e4, 50.0
    rng = rng_for(2, "calibration")
    times = np.sort(rng.uniform(0, duration, rng.poisson(rate * duration)))
    est = impulse_train_psd(times, np.ones(times.size), Binning(duration / 65536, 1024, 64))
    assert est.floor == pytest.approx(rate, rel=0.02)
    assert est.mean == pytest.approx(rate, rel=0.01)


def test_too_few_segments():
    with pytest.raises(UndersampledError):
        averaged_periodogram(np.zeros(1024 * 8), 1.0, 1024)


def test_psd_suite_passes(baseline_result):
    checks, _, estimates = psd_suite(baseline_result, seed=1, events=1e6)
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]
    assert set(estimates) == {"pressure", "recoil_1", "recoil_2", "recoil_3"}


def test_pressure_floor_is_not_b_squared(baseline_result):
    c = baseline_result.coefficients
    checks, _, _ = psd_suite(baseline_result, seed=2, events=1e6)
    floor = next(x for x in checks if x.name == "pressure floor")
    qp = 1.054571817e-34 * baseline_result.scenario.beam.omega0 * baseline_result.scenario.beam.mean_power
    assert floor.estimate / qp / c.B**2 == pytest.approx((c.B_prime / c.B) ** 2, rel=0.05)


def test_recoil_floor_ratio(baseline_result):
    checks, _, _ = psd_suite(baseline_result, seed=3, events=1e6)
    f = {c.name: c for c in checks}
    r1, r2 = f["recoil floor 1"], f["recoil floor 2"]
    ratio = r2.estimate / r1.estimate
    se = ratio * math.hypot(r1.stderr / r1.estimate, r2.stderr / r2.estimate)
    assert abs(ratio - 2.0) < 3 * se


def test_modulated_line_carries_b(baseline_result):
    c, b = baseline_result.coefficients, baseline_result.scenario.beam
    line = photons.modulated_pressure_line(c, b, depth=0.5, cycles=2000, bins_per_cycle=16,
                                           events=4e8, seed=0)
    target = c.B * (1 + c.P_a / c.P_s)
    assert abs(line.coefficient - target) < 3 * line.amplitude_stderr / line.power_amplitude


def test_dump_round_trip(tmp_path):
    t = np.array([0.1, 0.2, 0.35])
    imp = np.arange(9.0).reshape(3, 3)
    path = tmp_path / "d.bin"
    write_dump(path, t, imp)
    t2, imp2 = read_dump(path)
    assert np.array_equal(t, t2) and np.array_equal(imp, imp2)


@pytest.mark.parametrize("corrupt, match", [
    (lambda raw: b"XXXX" + raw[4:], "magic"),
    (lambda raw: raw[:4] + (2).to_bytes(4, "little") + raw[8:], "version"),
    (lambda raw: raw[:-8], "record count"),
    (lambda raw: raw[:5], "too short"),
])
def test_dump_rejects_bad_files(tmp_path, corrupt, match):
    path = tmp_path / "d.bin"
    write_dump(path, [0.0, 1.0], np.zeros((2, 3)))
    path.write_bytes(corrupt(path.read_bytes()))
    with pytest.raises(ValidationError, match=match):
        read_dump(path)


def test_dump_header_layout(tmp_path):
    path = tmp_path / "d.bin"
    write_dump(path, [0.0], np.zeros((1, 3)))
    raw = path.read_bytes()
    assert raw[:4] == b"LVTR"
    assert len(raw) == HEADER.size + 32


def test_ssa_thermal_chain():
    lr = LadderRates.from_rates(3.0, 1.0, 0.0, 0.0)
    tr = ssa_fock_trajectory(lr, seed=0)
    assert abs(tr.mean - 3.0) < 3 * tr.stderr


def test_ssa_reproducible():
    lr = LadderRates.from_rates(2.0, 1.0, 0.5, 0.02)
    a = ssa_fock_trajectory(lr, seed=9, relaxations=200)
    b = ssa_fock_trajectory(lr, seed=9, relaxations=200)
    assert a.mean == b.mean and a.jumps == b.jumps


def test_ssa_rejects_unstable():
    with pytest.raises(ValidationError):
        ssa_fock_trajectory(LadderRates.from_rates(1.0, 1.0, 0.0, 0.2), seed=0)


def test_ssa_large_times_finish(baseline_result):
    """Realistic (slow) rates put event times near 1e7 s; batches must still advance."""
    lr, factor = scaled_ladder(baseline_result.rates.ladder(1))
    assert factor < 1
    tr = ssa_fock_trajectory(lr, seed=0, relaxations=200)
    assert tr.time_reached > 1e6
    assert abs(tr.mean - lr.mean_occupation()) < 4 * tr.stderr


def test_oracle_check_logic():
    assert OracleCheck("x", 1.01, 0.005, 1.0).passed
    assert not OracleCheck("x", 1.02, 0.005, 1.0).passed  # outside 3σ
    assert not OracleCheck("x", 1.0, 0.02, 1.0).passed  # 3σ wider than 5%
    assert OracleCheck("x", 0.0, 1.0, 0.0, rel_bound=None).passed
