"""Oracle suites run by the command line: photon-noise spectra and ladder
trajectories checked against their closed-form targets."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..constants import HBAR
from ..errors import UndersampledError
from ..pipeline import PipelineResult
from ..rates import LadderRates
from . import photons
from .psd import Binning
from .ssa import ssa_fock_trajectory

N_SIGMA = 3.0
REL_BOUND = 0.05
LADDER_THERMAL_CAP = 10.0


@dataclass(frozen=True)
class OracleCheck:
    name: str
    estimate: float
    stderr: float
    target: float
    note: str = ""
    rel_bound: float | None = REL_BOUND  # None: only the nσ test applies

    @property
    def z_score(self):
        return (self.estimate - self.target) / self.stderr if self.stderr > 0 else math.inf

    @property
    def passed(self):
        if abs(self.estimate - self.target) > N_SIGMA * self.stderr:
            return False
        if self.rel_bound is not None and self.target != 0:
            return N_SIGMA * self.stderr <= self.rel_bound * abs(self.target)
        return True


def psd_suite(res: PipelineResult, seed=0, events=2_000_000, duration=None, segment=1024,
              segments=64):
    """Simulate photon streams and compare mean force, pressure and recoil floors,
    and angular moments, with their analytic values.

    Returns the checks, the simulated streams and the PSD estimates by name.
    """
    c, beam = res.coefficients, res.scenario.beam
    if duration is None:
        duration = photons.duration_for_events(c, beam, events)
    streams = photons.simulate_photon_streams(c, beam, duration, seed)
    binning = Binning(duration / (segment * segments), segment, segments)
    quantum_power = HBAR * beam.omega0 * beam.mean_power
    checks = []
    estimates = {}
    pressure = photons.radiation_pressure_psd(streams, c, binning)
    estimates["pressure"] = pressure
    # the simulated process carries the absorbed photons too; B·P̄ omits them
    exact_mean = c.kz * (c.P_s + c.P_a) / beam.omega0
    checks.append(OracleCheck("pressure mean", pressure.mean, pressure.mean_stderr, exact_mean,
                              f"B·P̄ = {c.B * beam.mean_power:.6e} N "
                              f"(differs by P_a/P_s = {c.P_a / c.P_s:.2e})"))
    checks.append(OracleCheck("pressure floor", pressure.floor, pressure.floor_stderr,
                              c.B_prime**2 * quantum_power,
                              f"B² would give {c.B**2 * quantum_power:.3e}"))
    for axis in (1, 2, 3):
        rec = photons.recoil_psd(streams, beam, axis, binning)
        estimates[f"recoil_{axis}"] = rec
        checks.append(OracleCheck(f"recoil floor {axis}", rec.floor, rec.floor_stderr,
                                  c.C[axis - 1] ** 2 * quantum_power))
        checks.append(OracleCheck(f"recoil mean {axis}", rec.mean, rec.mean_stderr, 0.0,
                                  rel_bound=None))
    mean_k, mean_se, sq, sq_se = photons.angular_moments(streams[0], beam.k0)
    k2 = beam.k0**2
    for axis in (1, 2, 3):
        share = 0.2 if axis == 1 else 0.4
        checks.append(OracleCheck(f"<k'_{axis}^2>/k0^2", sq[axis - 1] / k2,
                                  sq_se[axis - 1] / k2, share))
        checks.append(OracleCheck(f"<k'_{axis}>/k0", mean_k[axis - 1] / beam.k0,
                                  mean_se[axis - 1] / beam.k0, 0.0, rel_bound=None))
    return checks, streams, estimates


def scaled_ladder(lr: LadderRates, cap=LADDER_THERMAL_CAP):
    """Ladder with the one-phonon heating shrunk so the mean stays near ``cap``.

    Trajectories at realistic occupations (~1e7 phonons) are far too long to
    simulate; the scaled ladder keeps Γ, Γ_g and the Γ_r/(m̄_th·Γ) split.
    """
    gamma = lr.gamma
    heating = lr.up1
    if heating <= cap * gamma:
        return lr, 1.0
    factor = cap * gamma / heating
    up1 = heating * factor
    return LadderRates(up1, up1 + gamma, lr.up2, lr.down2), factor


def ladder_suite(res: PipelineResult, seed=0, relaxations=2000.0):
    """SSA time averages per axis against the closed-form stationary mean."""
    checks = []
    for axis in (1, 2, 3):
        lr, factor = scaled_ladder(res.rates.ladder(axis))
        traj = ssa_fock_trajectory(lr, seed=seed, stream=axis, relaxations=relaxations)
        note = f"heating scaled by {factor:.3e}" if factor != 1.0 else ""
        checks.append(OracleCheck(f"ladder mean {axis}", traj.mean, traj.stderr,
                                  lr.mean_occupation(), note, rel_bound=None))
    return checks


def require_events(res: PipelineResult, duration, minimum=photons.MIN_EVENTS):
    rate = photons.photon_rates(res.coefficients, res.scenario.beam)[0]
    if rate * duration < minimum:
        raise UndersampledError(
            f"duration {duration:.3g} s gives {rate * duration:.3g} events; "
            f"need ≥ {minimum:g} (duration ≥ {minimum / rate:.3g} s)")
