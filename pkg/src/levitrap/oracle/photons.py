"""Poisson photon streams scattered and absorbed by the particle.

Scattered photons leave with the dipole pattern: zenith angle θ measured
from the polarization (x) axis with density (3/4)·sin³θ, azimuth uniform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from ..constants import HBAR
from ..errors import UndersampledError, ValidationError
from ..optics import OpticalCoefficients
from ..scenario import BeamSpec
from . import rng_for

EVENT_LIMIT = 1_000_000_000
MIN_EVENTS = 100_000
KNOTS = 4096


def zenith_cdf(theta):
    """P(θ' ≤ θ) for the density (3/4)·sin³θ on [0, π]."""
    c = np.cos(theta)
    return 0.5 - 0.75 * c + 0.25 * c**3


def _build_inverse():
    theta = np.linspace(0.0, math.pi, KNOTS)
    return PchipInterpolator(zenith_cdf(theta), theta)


_INVERSE_CDF = _build_inverse()


def sample_zenith(u):
    """Inverse-CDF draw of θ' from uniforms ``u`` (tabulated monotone spline)."""
    return _INVERSE_CDF(np.asarray(u))


@dataclass(frozen=True)
class PhotonEventStream:
    kind: str  # "scatter" or "absorb"
    times: np.ndarray
    theta: np.ndarray | None
    phi: np.ndarray | None
    rate: float
    duration: float
    seed: int

    @property
    def count(self):
        return self.times.size

    def final_wavevectors(self, k0):
        """(n, 3) array of scattered-photon wavevectors."""
        if self.theta is None:
            raise ValidationError("absorbed photons carry no final direction")
        s = np.sin(self.theta)
        return k0 * np.column_stack((np.cos(self.theta), s * np.cos(self.phi),
                                     s * np.sin(self.phi)))


def _poisson_times(rate, duration, rng):
    expected = rate * duration
    if expected > EVENT_LIMIT:
        raise ValidationError(f"{expected:.3g} expected events exceeds the {EVENT_LIMIT:g} guard")
    n = rng.poisson(expected)
    # conditional on the count, Poisson arrival times are iid uniform
    return np.sort(rng.uniform(0.0, duration, n))


def photon_rates(coeffs: OpticalCoefficients, beam: BeamSpec):
    """(scatter, absorb) photon rates in 1/s."""
    quantum = HBAR * beam.omega0
    return coeffs.P_s / quantum, coeffs.P_a / quantum


def duration_for_events(coeffs, beam, events):
    return events / photon_rates(coeffs, beam)[0]


def simulate_photon_streams(coeffs: OpticalCoefficients, beam: BeamSpec, duration, seed,
                            min_events=MIN_EVENTS):
    """Independent scatter and absorb streams over ``duration`` seconds.

    Raises
    ------
    UndersampledError
        If fewer than ``min_events`` scatter events are expected.
    """
    rate_s, rate_a = photon_rates(coeffs, beam)
    if rate_s * duration < min_events:
        raise UndersampledError(
            f"only {rate_s * duration:.3g} scatter events expected; "
            f"use a duration of at least {min_events / rate_s:.3g} s")
    times_s = _poisson_times(rate_s, duration, rng_for(seed, "scatter"))
    dirs = rng_for(seed, "directions")
    u = dirs.random((times_s.size, 2))
    theta = sample_zenith(u[:, 0])
    phi = 2.0 * math.pi * u[:, 1]
    times_a = _poisson_times(rate_a, duration, rng_for(seed, "absorb"))
    scatter = PhotonEventStream("scatter", times_s, theta, phi, rate_s, duration, seed)
    absorb = PhotonEventStream("absorb", times_a, None, None, rate_a, duration, seed)
    return scatter, absorb


def angular_moments(stream: PhotonEventStream, k0):
    """Sample mean and standard error of k'_i and k'_i² for each axis."""
    k = stream.final_wavevectors(k0)
    n = k.shape[0]
    mean = k.mean(axis=0)
    mean_se = k.std(axis=0, ddof=1) / math.sqrt(n)
    sq = k**2
    return mean, mean_se, sq.mean(axis=0), sq.std(axis=0, ddof=1) / math.sqrt(n)


def axis_impulses(scatter: PhotonEventStream, absorb: PhotonEventStream, kz, k0):
    """Merged event times with per-event momentum kicks on the particle.

    Every photon (scattered or absorbed) delivers ħk_z along z on arrival;
    each scattered photon adds the recoil -ħk'. Returns times (n,) and
    impulses (n, 3) split as (recoil_x, recoil_y, recoil_z + pressure_z) and
    the separate pressure and recoil parts for analysis.
    """
    recoil = np.zeros((scatter.count + absorb.count, 3))
    recoil[: scatter.count] = -HBAR * scatter.final_wavevectors(k0)
    times = np.concatenate((scatter.times, absorb.times))
    order = np.argsort(times, kind="stable")
    pressure = np.full(times.size, HBAR * kz)
    return times[order], pressure[order], recoil[order]


def default_binning(scatter: PhotonEventStream, segment=1024, segments=64):
    """Grid covering the stream duration with the requested segmentation."""
    from .psd import Binning

    return Binning(scatter.duration / (segment * segments), segment, segments)


def radiation_pressure_psd(streams, coeffs: OpticalCoefficients, binning=None):
    """Axial kick train ħk_z per scattered or absorbed photon."""
    from .psd import impulse_train_psd

    scatter, absorb = streams
    binning = binning or default_binning(scatter)
    times = np.concatenate((scatter.times, absorb.times))
    kicks = np.full(times.size, HBAR * coeffs.kz)
    return impulse_train_psd(times, kicks, binning)


def recoil_psd(streams, beam: BeamSpec, axis, binning=None):
    """Recoil kick train -ħk'_i per scattered photon along ``axis``."""
    from .psd import impulse_train_psd

    scatter, _ = streams
    binning = binning or default_binning(scatter)
    kicks = -HBAR * scatter.final_wavevectors(beam.k0)[:, axis - 1]
    return impulse_train_psd(scatter.times, kicks, binning)


@dataclass(frozen=True)
class ModulatedLine:
    amplitude: float  # fitted force amplitude at the modulation frequency
    amplitude_stderr: float
    power_amplitude: float  # P̄·depth, amplitude of the power modulation

    @property
    def coefficient(self):
        """Force line amplitude per watt of power modulation."""
        return self.amplitude / self.power_amplitude


def modulated_pressure_line(coeffs: OpticalCoefficients, beam: BeamSpec, depth,
                            cycles, bins_per_cycle, events, seed):
    """Axial radiation-pressure force under a classical power modulation.

    The beam power is P̄(1 + depth·sin ωt); photon counts per bin are Poisson
    with the instantaneous rate. A lock-in projection returns the force
    amplitude at ω, which should equal B·P̄·depth, i.e. the modulation enters
    with B² in the force spectrum while the shot-noise floor carries B'².
    """
    rate_s, rate_a = photon_rates(coeffs, beam)
    rate = rate_s + rate_a
    n_bins = cycles * bins_per_cycle
    dt = events / rate / n_bins
    t = (np.arange(n_bins) + 0.5) * dt
    omega = 2.0 * math.pi / (bins_per_cycle * dt)
    # exact bin-integrated intensity of the sinusoidal modulation
    window = np.sinc(1.0 / bins_per_cycle)
    shape = 1.0 + depth * np.sin(omega * t) * window
    counts = rng_for(seed, "modulated").poisson(rate * dt * shape)
    force = HBAR * coeffs.kz * counts / dt
    ref = np.sin(omega * t)
    # undo the bin averaging so the amplitude refers to the instantaneous force
    amp = 2.0 * np.mean(force * ref) / window
    # per-bin noise variance (ħk_z)²·rate/dt projected onto the reference
    se = (2.0 * HBAR * coeffs.kz * math.sqrt(rate / dt) * math.sqrt(np.mean(ref**2) / n_bins)
          / window)
    return ModulatedLine(float(amp), float(se), beam.mean_power * depth)
