"""Exact-jump simulation of the phonon-number ladder for one axis."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..errors import ValidationError
from ..rates import LadderRates
from . import seed_sequence

STATE_GUARD = 10**8


@njit(cache=True)
def _ladder_kernel(up1, down1, up2, down2, m0, t_burn, t_end, n_batches, guard, seed,
                   max_jumps):
    np.random.seed(seed)
    m = m0
    t = 0.0
    batch_len = (t_end - t_burn) / n_batches
    sums = np.zeros(n_batches)
    jumps = 0
    exploded = False
    peak = m
    while t < t_end:
        a1 = up1 * (m + 1.0)
        a2 = down1 * m
        a3 = up2 * (m + 1.0) * (m + 2.0)
        a4 = down2 * m * (m - 1.0)
        total = a1 + a2 + a3 + a4
        tau = -math.log(1.0 - np.random.random()) / total
        # accumulate occupancy over [t, t + tau) clipped to the sampling window
        lo = max(t, t_burn)
        hi = min(t + tau, t_end)
        if lo < hi:
            b = max(int((lo - t_burn) / batch_len), 0)
            # step the batch index explicitly; at large t the edge can round onto lo
            while lo < hi and b < n_batches:
                edge = min(hi, t_burn + (b + 1) * batch_len)
                if edge > lo:
                    sums[b] += m * (edge - lo)
                    lo = edge
                b += 1
        t += tau
        if t >= t_end:
            break
        r = np.random.random() * total
        if r < a1:
            m += 1
        elif r < a1 + a2:
            m -= 1
        elif r < a1 + a2 + a3:
            m += 2
        else:
            m -= 2
        jumps += 1
        if m > peak:
            peak = m
        if m > guard:
            exploded = True
            break
        if jumps >= max_jumps:
            break
    return sums / batch_len, jumps, m, peak, exploded, t


@dataclass(frozen=True)
class LadderTrajectory:
    mean: float  # time-averaged m after burn-in
    stderr: float  # batch-means standard error
    jumps: int
    final_state: int
    peak_state: int
    exploded: bool
    time_reached: float
    batch_means: np.ndarray


def relaxation_rate(lr: LadderRates):
    return lr.gamma - 8.0 * lr.up2


def ssa_fock_trajectory(lr: LadderRates, duration=None, seed=0, relaxations=2000.0,
                        n_batches=40, guard=STATE_GUARD, m0=0, max_jumps=2_000_000_000,
                        require_stable=True, stream=0):
    """Event-driven trajectory of the ladder with batch-means error bars.

    Parameters
    ----------
    duration : float, optional
        Sampling time after burn-in; defaults to ``relaxations`` relaxation
        times 1/(Γ - 8Γ_g). Burn-in is ten relaxation times.
    guard : int
        Stop and flag an explosion once m exceeds this state.
    require_stable : bool
        Reject rate sets without a stationary mean unless False (used to
        demonstrate the instability).
    stream : int
        Sub-stream index, so several trajectories can share one user seed.
    """
    relax = relaxation_rate(lr)
    if require_stable and relax <= 0:
        raise ValidationError("Γ ≤ 8Γ_g: no stationary mean to estimate")
    scale = 1.0 / abs(relax) if relax != 0 else 1.0 / lr.gamma
    burn = 10.0 * scale
    duration = relaxations * scale if duration is None else duration
    if require_stable and duration < 50.0 * scale:
        raise ValidationError("duration must cover at least 50 relaxation times")
    seed32 = int(seed_sequence(seed, "ladder", stream).generate_state(1)[0])
    batches, jumps, m, peak, exploded, t = _ladder_kernel(
        lr.up1, lr.down1, lr.up2, lr.down2, int(m0), burn, burn + duration,
        int(n_batches), int(guard), seed32, int(max_jumps))
    mean = float(batches.mean())
    stderr = float(batches.std(ddof=1) / math.sqrt(n_batches))
    return LadderTrajectory(mean, stderr, int(jumps), int(m), int(peak), bool(exploded),
                            float(t), batches)
