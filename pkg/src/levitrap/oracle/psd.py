"""Spectral estimation of binned impulse trains.

Convention: double-sided density in angular frequency,
S(ω) = ∫ R(τ) e^{iωτ} dτ, so a Poisson train of impulses q at rate λ has the
white floor q²·λ. The force series is the impulse per bin divided by the bin
width; a segment of L bins gives the periodogram dt·|FFT|²/L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import UndersampledError

MIN_SEGMENTS = 32
SKIP_BINS = 3  # DC and the first two bins are left out of floor fits


@dataclass(frozen=True)
class PsdEstimate:
    frequencies: np.ndarray  # rad/s, non-negative half
    density: np.ndarray
    floor: float
    floor_stderr: float
    mean: float
    mean_stderr: float
    segments: int

    def within(self, target, n_sigma=3.0, rel=0.05):
        """|estimate - target| ≤ nσ and nσ ≤ rel·|target|."""
        return (abs(self.floor - target) <= n_sigma * self.floor_stderr
                and n_sigma * self.floor_stderr <= rel * abs(target))


@dataclass(frozen=True)
class Binning:
    dt: float
    segment: int = 1024
    segments: int = 64

    @property
    def n_bins(self):
        return self.segment * self.segments

    @property
    def duration(self):
        return self.dt * self.n_bins


def bin_impulses(times, impulses, binning: Binning):
    """Force series (impulse per bin / dt) on a regular grid from t = 0."""
    idx = np.floor(np.asarray(times) / binning.dt).astype(np.int64)
    keep = (idx >= 0) & (idx < binning.n_bins)
    summed = np.bincount(idx[keep], weights=np.asarray(impulses)[keep],
                         minlength=binning.n_bins)
    return summed / binning.dt


def averaged_periodogram(series, dt, segment):
    """Per-segment periodograms (K, segment//2 + 1) and the angular grid."""
    n_seg = series.size // segment
    if n_seg < MIN_SEGMENTS:
        raise UndersampledError(
            f"{n_seg} averaging segments (< {MIN_SEGMENTS}); lengthen the run")
    blocks = series[: n_seg * segment].reshape(n_seg, segment)
    spectra = dt * np.abs(np.fft.rfft(blocks, axis=1)) ** 2 / segment
    omega = 2.0 * math.pi * np.fft.rfftfreq(segment, dt)
    return omega, spectra


def estimate_psd(series, binning: Binning) -> PsdEstimate:
    """White floor and mean of a force series with segment-scatter errors."""
    omega, spectra = averaged_periodogram(series, binning.dt, binning.segment)
    per_segment = spectra[:, SKIP_BINS:-1].mean(axis=1)
    k = per_segment.size
    n_seg = spectra.shape[0]
    seg_means = series[: n_seg * binning.segment].reshape(n_seg, -1).mean(axis=1)
    return PsdEstimate(
        frequencies=omega,
        density=spectra.mean(axis=0),
        floor=float(per_segment.mean()),
        floor_stderr=float(per_segment.std(ddof=1) / math.sqrt(k)),
        mean=float(seg_means.mean()),
        mean_stderr=float(seg_means.std(ddof=1) / math.sqrt(n_seg)),
        segments=n_seg,
    )


def impulse_train_psd(times, impulses, binning: Binning) -> PsdEstimate:
    return estimate_psd(bin_impulses(times, impulses, binning), binning)
