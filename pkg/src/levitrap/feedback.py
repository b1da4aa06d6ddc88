"""Feedback cooling: measurement-noise heating, critical and optimum gains,
operating conditions and the self-consistent phonon occupations.

Two schemes are modelled. In the parametric scheme every axis is cooled by
modulating the trapping-laser power; the injected measurement noise then
drives gradient-force fluctuations (rate Γ̃_g) and, through the mean radiation
pressure, one-phonon heating of the axial mode (Γ̃_r,3). In the hybrid scheme
one axis k is cooled instead by an electric (Coulomb) force on a charged
particle; that axis has no critical gain but picks up direct force noise
Γ̃_r,k ∝ Γ_fb,k².
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .constants import HBAR
from .detection import NoiseFloor
from .errors import (ConvergenceError, FeedbackInstability, OperatingConditionError,
                     TrapUnstable, ValidationError)
from .rates import RateSet, steady_state_occupation
from .scenario import FeedbackPlan, SolverSettings

# relative slack when comparing a margin with its threshold; a margin set
# exactly at the threshold through a root solve lands a few ulps either side
MARGIN_RTOL = 1e-6


def position_variance(occupation, omega, mass):
    """⟨x²⟩ = (2m̄ + 1)ħ/(2MΩ)."""
    return (2.0 * occupation + 1.0) * HBAR / (2.0 * mass * omega)


def _heating(rates: RateSet, i):
    return rates.n_thermal[i] * rates.gamma + rates.gamma_r[i]


def _parametric_axes(plan: FeedbackPlan):
    if plan.scheme == "hybrid":
        return tuple(j for j in range(3) if j != plan.coulomb_axis - 1)
    return (0, 1, 2)


@dataclass(frozen=True)
class FeedbackRates:
    gains: tuple
    gamma_g_fb: tuple  # Γ̃_g,i
    gamma_r_fb: tuple  # Γ̃_r,i
    variance: tuple  # ⟨x_i²⟩ at which the rates were evaluated


def feedback_noise_rates(rates: RateSet, nf: NoiseFloor, plan: FeedbackPlan, gains,
                         occupations, filtered=None) -> FeedbackRates:
    """Measurement-noise rates Γ̃_g,i and Γ̃_r,i for given occupations."""
    filtered = nf.detection.filtered if filtered is None else filtered
    M, A, B = rates.mass, rates.stiffness_per_watt, rates.pressure_per_watt
    S = nf.S
    var = tuple(position_variance(occupations[i], rates.omega[i], M) for i in range(3))
    # noise drive of each parametrically cooled axis j: Γ_fb,j²·S_nj/⟨x_j²⟩
    drive = {j: gains[j] ** 2 * S[j] / var[j] for j in _parametric_axes(plan)}
    g_fb = [0.0, 0.0, 0.0]
    r_fb = [0.0, 0.0, 0.0]
    for i in range(3):
        if filtered:
            g_fb[i] = drive[i] / 4.0 if i in drive else 0.0
        else:
            g_fb[i] = sum((A[i] / A[j]) ** 2 * d / 4.0 for j, d in drive.items())
    if not filtered:
        r_fb[2] = M * rates.omega[2] * sum(
            (B / A[j]) ** 2 * d / (2.0 * HBAR) for j, d in drive.items())
    if plan.scheme == "hybrid":
        k = plan.coulomb_axis - 1
        r_fb[k] += M * rates.omega[k] * gains[k] ** 2 * S[k] / (2.0 * HBAR)
    return FeedbackRates(tuple(gains), tuple(g_fb), tuple(r_fb), var)


def critical_feedback_rates(rates: RateSet, nf: NoiseFloor, plan: FeedbackPlan):
    """Γ_fb,cr,i per axis (filtered closed form); ``inf`` on the Coulomb axis."""
    out = []
    for i in range(3):
        if plan.scheme == "hybrid" and i == plan.coulomb_axis - 1:
            out.append(math.inf)
            continue
        cube = (_heating(rates, i) * rates.gamma * HBAR
                / (2.0 * rates.mass * rates.omega[i] * nf.S[i]))
        out.append(cube ** (1.0 / 3.0))
    return tuple(out)


@dataclass(frozen=True)
class CoulombOptimum:
    axis: int
    gain: float
    min_occupation: float
    sweep_gain: float  # minimizer located numerically
    sweep_occupation: float

    @property
    def sweep_offset(self):
        return self.sweep_gain / self.gain - 1.0


def coulomb_occupation(rates: RateSet, nf: NoiseFloor, axis, gain):
    """Simplified occupation (H + MΩ·Γ_fb²·S/(2ħ))/Γ_fb of a Coulomb-cooled axis."""
    i = axis - 1
    noise = rates.mass * rates.omega[i] * gain**2 * nf.S[i] / (2.0 * HBAR)
    return (_heating(rates, i) + noise) / gain


def optimum_coulomb_gain(rates: RateSet, nf: NoiseFloor, axis) -> CoulombOptimum:
    """Gain minimizing the Coulomb-axis occupation, closed form and by search.

    The search is a bounded scalar minimization over log(Γ_fb) on
    [0.1, 10]·Γ_fb,opt.
    """
    if axis not in (1, 2, 3):
        raise ValidationError(f"coulomb axis must be 1, 2 or 3 (got {axis})")
    i = axis - 1
    H = _heating(rates, i)
    MOS = rates.mass * rates.omega[i] * nf.S[i]
    gain = math.sqrt(H * 2.0 * HBAR / MOS)
    m_min = 2.0 * math.sqrt(H * MOS / (2.0 * HBAR))

    def objective(log_ratio):
        return coulomb_occupation(rates, nf, axis, gain * math.exp(log_ratio)) / m_min

    res = minimize_scalar(objective, bounds=(math.log(0.1), math.log(10.0)),
                          method="bounded", options={"xatol": 1e-9})
    found = gain * math.exp(res.x)
    return CoulombOptimum(axis, gain, m_min, found, coulomb_occupation(rates, nf, axis, found))


def resolve_gains(rates: RateSet, nf: NoiseFloor, plan: FeedbackPlan):
    """Per-axis gains from the plan: explicit > fraction of critical > fraction of
    optimum (Coulomb axis only) > zero."""
    if plan.scheme == "none":
        return (0.0, 0.0, 0.0)
    critical = critical_feedback_rates(rates, nf, plan)
    gains = []
    for i in range(3):
        explicit = plan.gains[i] if plan.gains else None
        if explicit is not None:
            gains.append(float(explicit))
        elif plan.critical_fraction is not None and math.isfinite(critical[i]):
            gains.append((plan.critical_fraction * critical[i] ** 3) ** (1.0 / 3.0))
        elif (plan.optimum_fraction is not None and plan.scheme == "hybrid"
              and i == plan.coulomb_axis - 1):
            gains.append(plan.optimum_fraction * optimum_coulomb_gain(rates, nf, i + 1).gain)
        else:
            gains.append(0.0)
    return tuple(gains)


# --------------------------------------------------------------------------
# operating conditions

@dataclass(frozen=True)
class Margin:
    condition: str  # i, ii, iii, iv
    label: str
    value: float
    threshold: float
    exempt: bool = False

    @property
    def passed(self):
        return self.exempt or self.value >= self.threshold * (1.0 - MARGIN_RTOL)


@dataclass(frozen=True)
class ConditionLedger:
    margins: tuple

    @property
    def operable(self):
        return all(m.passed for m in self.margins)

    def failures(self):
        return [m for m in self.margins if not m.passed]

    def get(self, label):
        for m in self.margins:
            if m.label == label:
                return m
        raise KeyError(label)


def condition_ledger(rates: RateSet, plan: FeedbackPlan, gains=(0.0, 0.0, 0.0),
                     critical=(math.inf, math.inf, math.inf),
                     settings: SolverSettings = SolverSettings()) -> ConditionLedger:
    """Margins of the four operating conditions (larger is safer).

    (i)   |Ω_j - Ω_i|/(δ_i + δ_j) for each pair
    (ii)  |2Ω_j - Ω_3|/(2δ_j + δ_3), exempt for the Coulomb axis
    (iii) Γ/Γ_cr
    (iv)  Γ_fb,cr,i³/Γ_fb,i³ where the critical gain is finite
    """
    om, G = rates.omega, rates.gamma
    width = [(G + g) / 2.0 for g in gains]
    hybrid_axis = plan.coulomb_axis - 1 if plan.scheme == "hybrid" else None
    out = []
    t = settings.threshold_for
    for i in range(3):
        for j in range(i + 1, 3):
            out.append(Margin("i", f"(i) axes {i + 1},{j + 1}",
                              _ratio(abs(om[j] - om[i]), width[i] + width[j]), t("i")))
    for j in range(3):
        out.append(Margin("ii", f"(ii) axis {j + 1}",
                          _ratio(abs(2.0 * om[j] - om[2]), 2.0 * width[j] + width[2]),
                          t("ii"), exempt=j == hybrid_axis))
    out.append(Margin("iii", "(iii) Γ/Γ_cr", rates.damping_margin, t("iii")))
    for i in range(3):
        if math.isfinite(critical[i]):
            out.append(Margin("iv", f"(iv) axis {i + 1}",
                              _ratio(critical[i] ** 3, gains[i] ** 3), t("iv")))
    return ConditionLedger(tuple(out))


def _ratio(num, den):
    if den == 0:
        return math.inf if num > 0 else 0.0
    return num / den


# --------------------------------------------------------------------------
# self-consistent occupations

@dataclass(frozen=True)
class FeedbackReport:
    scheme: str
    occupations: tuple
    rates: FeedbackRates
    critical: tuple
    optimum: CoulombOptimum | None
    ledger: ConditionLedger
    iterations: int
    residual: float
    seed_occupations: tuple
    intrinsic_margin: tuple  # Γ/(8Γ_g,i + 8Γ̃_g,i)
    gain_over_damping: tuple  # Γ_fb,i/Γ, assumed large by the critical-gain formula


def eq3_map(rates: RateSet, nf: NoiseFloor, plan: FeedbackPlan, gains, occupations):
    """One application of the occupation balance with feedback."""
    fr = feedback_noise_rates(rates, nf, plan, gains, occupations)
    out = []
    for i in range(3):
        num = (rates.n_thermal[i] * rates.gamma + rates.gamma_r[i] + 4.0 * rates.gamma_g[i]
               + fr.gamma_r_fb[i] + 4.0 * fr.gamma_g_fb[i])
        den = rates.gamma + gains[i] - 8.0 * rates.gamma_g[i] - 8.0 * fr.gamma_g_fb[i]
        if den <= 0:
            if gains[i] == 0 and fr.gamma_g_fb[i] == 0:
                raise TrapUnstable(i + 1, rates.damping_margin)
            raise FeedbackInstability(i + 1, den)
        out.append(num / den)
    return tuple(out), fr


def simplified_occupations(rates: RateSet, gains):
    """Occupations neglecting all two-phonon terms, (H_i)/(Γ + Γ_fb,i)."""
    return tuple(_heating(rates, i) / (rates.gamma + gains[i]) for i in range(3))


def solve_fixed_point(rates, nf, plan, gains, seed, settings: SolverSettings):
    """Damped iteration m ← (1-d)·m + d·F(m) until |F(m) - m| ≤ tol·F(m).

    Returns F at the accepted iterate, its residual and the iteration count.
    """
    m = tuple(seed)
    d = settings.damping
    history = []
    for it in range(1, settings.max_iterations + 1):
        fm, fr = eq3_map(rates, nf, plan, gains, m)
        res = max(abs(a - b) / abs(a) for a, b in zip(fm, m))
        history.append(res)
        if res <= settings.tolerance:
            return fm, fr, it
        m = tuple((1.0 - d) * a + d * b for a, b in zip(m, fm))
    raise ConvergenceError(
        f"feedback fixed point did not converge in {settings.max_iterations} iterations",
        history)


def fixed_point_residual(rates, nf, plan, gains, occupations):
    fm, _ = eq3_map(rates, nf, plan, gains, occupations)
    return max(abs(a - b) / abs(b) for a, b in zip(fm, occupations))


def occupations_with_feedback(rates: RateSet, nf: NoiseFloor, plan: FeedbackPlan,
                              settings: SolverSettings = SolverSettings(),
                              gains=None, seed=None) -> FeedbackReport:
    """Self-consistent occupations under the feedback plan.

    Parameters
    ----------
    gains : tuple, optional
        Overrides the plan's gain rules.
    seed : tuple, optional
        Starting occupations; defaults to the simplified balance at zero
        measurement noise.

    Raises
    ------
    FeedbackInstability
        If a denominator becomes non-positive during iteration.
    OperatingConditionError
        In strict mode, if any operating condition fails.
    """
    gains = resolve_gains(rates, nf, plan) if gains is None else tuple(gains)
    if any(g < 0 for g in gains):
        raise ValidationError("feedback gains must be non-negative")
    critical = critical_feedback_rates(rates, nf, plan)
    if plan.scheme == "none":
        occ = steady_state_occupation(rates)
        fr = FeedbackRates(gains, (0.0,) * 3, (0.0,) * 3,
                           tuple(position_variance(occ[i], rates.omega[i], rates.mass)
                                 for i in range(3)))
        seed_occ, occ_final, it = occ, occ, 0
    else:
        seed_occ = simplified_occupations(rates, gains) if seed is None else tuple(seed)
        occ_final, fr, it = solve_fixed_point(rates, nf, plan, gains, seed_occ, settings)
    residual = fixed_point_residual(rates, nf, plan, gains, occ_final)
    ledger = condition_ledger(rates, plan, gains, critical, settings)
    if settings.strict and not ledger.operable:
        failed = ", ".join(m.label for m in ledger.failures())
        raise OperatingConditionError(f"operating conditions failed: {failed}")
    optimum = None
    if plan.scheme == "hybrid":
        optimum = optimum_coulomb_gain(rates, nf, plan.coulomb_axis)
    intrinsic = tuple(_ratio(rates.gamma, 8.0 * rates.gamma_g[i] + 8.0 * fr.gamma_g_fb[i])
                      for i in range(3))
    return FeedbackReport(
        scheme=plan.scheme, occupations=tuple(occ_final), rates=fr, critical=critical,
        optimum=optimum, ledger=ledger, iterations=it, residual=residual,
        seed_occupations=tuple(seed_occ), intrinsic_margin=intrinsic,
        gain_over_damping=tuple(_ratio(g, rates.gamma) for g in gains),
    )


def gain_sweep(rates, nf, plan, axis, gains, settings=SolverSettings()):
    """Self-consistent occupation of ``axis`` for each gain in ``gains``
    (other axes keep their resolved gains)."""
    base = list(resolve_gains(rates, nf, plan))
    out = np.empty(len(gains))
    for n, g in enumerate(gains):
        base[axis - 1] = float(g)
        out[n] = occupations_with_feedback(rates, nf, plan, settings,
                                           gains=tuple(base)).occupations[axis - 1]
    return out
