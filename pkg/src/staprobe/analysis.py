"""Cross-cutting analysis: scaling fits, phase optimization, dephasing
attenuation, and the shot-noise budget with its Monte Carlo validation."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .operators import dephase, hermitian_eigensystem
from .propagation import DEFAULT_STEPS

__all__ = [
    "EPSILON_GRID",
    "uniform_phase_grid",
    "ScalingFit",
    "loglog_fit",
    "PhaseOptimum",
    "phase_maximize",
    "dephasing_ratio",
    "DephasingPoint",
    "dephasing_series",
    "ShotBudget",
    "shot_budget",
    "MonteCarloReport",
    "shot_noise_monte_carlo",
]

#: Default error-amplitude sweep: 10 log-spaced points in the weak-error window.
EPSILON_GRID = tuple(float(x) for x in np.geomspace(0.01, 0.1, 10))


def uniform_phase_grid(n: int) -> np.ndarray:
    """n uniform phases on [0, 2pi), endpoint excluded."""
    if n < 1:
        raise ValidationError("phase grid needs at least one point")
    return np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares power-law fit of signal vs epsilon on log-log axes.

    intercept is the natural-log offset: signal ~ exp(intercept) * eps^slope.
    floor_excluded counts sweep points dropped for sitting within 10x of the
    epsilon = 0 baseline.
    """

    slope: float
    intercept: float
    residual_rms: float
    n_points_used: int
    floor_excluded: int


def loglog_fit(epsilons, signals, floor: float = 0.0) -> ScalingFit:
    """Fit log|signal| = slope * log(eps) + intercept over floor-filtered points.

    Points with signal <= 10 * floor are excluded (they sit on the numerical
    baseline, not the power law); fewer than 4 surviving points is an error.
    """
    eps = np.asarray(epsilons, dtype=float)
    sig = np.asarray(signals, dtype=float)
    if eps.shape != sig.shape or eps.ndim != 1:
        raise ValidationError("epsilons and signals must be 1-d arrays of equal length")
    if np.any(eps <= 0) or np.any(np.diff(eps) <= 0):
        raise ValidationError("epsilons must be strictly positive and increasing")
    usable = sig > 10.0 * floor
    if np.count_nonzero(usable) < 4:
        raise ValidationError(
            f"only {int(np.count_nonzero(usable))} points above 10x floor; need >= 4"
        )
    x = np.log(eps[usable])
    y = np.log(sig[usable])
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    return ScalingFit(
        slope=float(slope),
        intercept=float(intercept),
        residual_rms=float(np.sqrt(np.mean(residuals**2))),
        n_points_used=int(np.count_nonzero(usable)),
        floor_excluded=int(np.count_nonzero(~usable)),
    )


@dataclass(frozen=True)
class PhaseOptimum:
    phase: float
    value: float
    fourier_amplitude: float


def phase_maximize(values_on_grid) -> PhaseOptimum:
    """Grid maximum and first-harmonic amplitude of a phase-swept signal.

    ``values_on_grid`` is an iterable of (phase, value) pairs on a uniform
    grid covering [0, 2pi). The Fourier amplitude 2|sum v e^{-i phi}|/N is
    the amplitude of the e^{+-i phi} component; for a pure sinusoid it
    matches the grid maximum up to grid resolution.
    """
    arr = np.asarray(list(values_on_grid), dtype=float)
    if arr.size == 0:
        raise ValidationError("phase grid must not be empty")
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValidationError("expected (phase, value) pairs")
    phases, values = arr[:, 0], arr[:, 1]
    idx = int(np.argmax(values))
    amplitude = 2.0 * np.abs(values @ np.exp(-1j * phases)) / len(values)
    return PhaseOptimum(
        phase=float(phases[idx]), value=float(values[idx]), fourier_amplitude=float(amplitude)
    )


def dephasing_ratio(
    a_coeff: float, b_coeff: float, epsilon: float, gamma_phi: float, tau: float
) -> float:
    """Coherent-to-population signal ratio (A/B) e^{-Gamma tau} / epsilon."""
    if epsilon <= 0:
        raise ValidationError("epsilon must be positive")
    if b_coeff == 0:
        raise ValidationError("population coefficient must be nonzero")
    return (a_coeff / b_coeff) * math.exp(-gamma_phi * tau) / epsilon


@dataclass(frozen=True)
class DephasingPoint:
    epsilon: float
    gamma_tau: float
    coherent_signal: float
    population_signal: float
    ratio: float


def dephasing_series(a_coeff: float, b_coeff: float, epsilons, gamma_taus) -> list[DephasingPoint]:
    """Attenuated coherent signal A eps e^{-Gamma tau} against B eps^2.

    The ratio column reproduces :func:`dephasing_ratio`; dephasing rescales
    the linear signal uniformly, so the linear-vs-quadratic hierarchy
    survives any fixed Gamma tau.
    """
    points = []
    for gt in gamma_taus:
        attenuation = math.exp(-float(gt))
        for eps in epsilons:
            coherent = a_coeff * float(eps) * attenuation
            population = b_coeff * float(eps) ** 2
            points.append(
                DephasingPoint(
                    epsilon=float(eps),
                    gamma_tau=float(gt),
                    coherent_signal=coherent,
                    population_signal=population,
                    ratio=coherent / population,
                )
            )
    return points


@dataclass(frozen=True)
class ShotBudget:
    """Branch shot count meeting a target signal-to-noise ratio.

    n_br = ceil(R^2 Omega_f^2 / (2 A^2 e^{-2 Gamma tau} eps^2)) with Omega_f
    the spread of the final-energy outcomes and A the measured linear
    coefficient of the coherent signal.
    """

    n_br: int
    r: float
    omega_f_bound: float
    a_coeff: float
    epsilon: float
    gamma_phi: float
    tau: float


def shot_budget(
    r: float,
    omega_f_bound: float,
    a_coeff: float,
    epsilon: float,
    gamma_phi: float = 0.0,
    tau: float = 0.0,
) -> ShotBudget:
    if r <= 0 or omega_f_bound <= 0 or epsilon <= 0:
        raise ValidationError("r, omega_f_bound, epsilon must be positive")
    if a_coeff == 0:
        raise ValidationError("a_coeff must be nonzero")
    signal = abs(a_coeff) * epsilon * math.exp(-gamma_phi * tau)
    n = math.ceil(r**2 * omega_f_bound**2 / (2.0 * signal**2))
    return ShotBudget(
        n_br=int(n),
        r=float(r),
        omega_f_bound=float(omega_f_bound),
        a_coeff=float(a_coeff),
        epsilon=float(epsilon),
        gamma_phi=float(gamma_phi),
        tau=float(tau),
    )


@dataclass(frozen=True)
class MonteCarloReport:
    """Seeded two-branch sampling of the coherent endpoint estimator.

    estimate is the mean over repetitions; empirical_variance the ddof=1
    variance across repetitions (nan for a single repetition);
    bound_variance the conservative Omega_f^2/(2 n_br). standard_errors
    holds each repetition's own estimated standard error from per-branch
    sample variances.
    """

    estimate: float
    empirical_variance: float
    bound_variance: float
    estimates: np.ndarray
    standard_errors: np.ndarray
    seed: int
    n_br: int
    repetitions: int


def shot_noise_monte_carlo(
    spec,
    probe_phase: float,
    n_br: int,
    seed: int,
    repetitions: int = 1,
    steps: int = DEFAULT_STEPS,
    gamma_phi: float = 0.0,
) -> MonteCarloReport:
    """Simulate the two-branch endpoint protocol with projective final readout.

    Each branch draws n_br outcomes from the final-energy distribution of
    the propagated state -- once for the coherent preparation, once for the
    dephased one -- and the difference of sample means estimates the
    coherent correction. Dephasing is applied analytically as an e^{-Gamma
    tau} multiplier on the initial coherences. Repetitions use independently
    derived seeds and may be reproduced in any order.
    """
    from .qubit import equatorial_probe, propagate, reference_hamiltonians

    if spec.system != "qubit":
        raise ValidationError("shot_noise_monte_carlo supports the qubit benchmark")
    if n_br < 1 or repetitions < 1:
        raise ValidationError("n_br and repetitions must be >= 1")

    u = propagate(spec, steps)
    h0i, h0f = reference_hamiltonians(spec)
    spec0 = hermitian_eigensystem(h0i)
    spec_tau = hermitian_eigensystem(h0f)
    outcomes = spec_tau.energies

    rho = equatorial_probe(spec, probe_phase, spec0)
    rho_deph = dephase(rho, spec0)
    rho_coh = rho_deph + math.exp(-gamma_phi * spec.tau) * (rho - rho_deph)

    def branch_probabilities(state: np.ndarray) -> np.ndarray:
        final = u @ state @ u.conj().T
        p = np.array([float(np.trace(proj @ final).real) for proj in spec_tau.projectors])
        if p.min() < -1e-9 or abs(p.sum() - 1.0) > 1e-9:
            raise ValidationError("final-energy probabilities are not a distribution")
        p = np.clip(p, 0.0, None)
        return p / p.sum()

    p_coh = branch_probabilities(rho_coh)
    p_deph = branch_probabilities(rho_deph)

    estimates = np.empty(repetitions)
    standard_errors = np.empty(repetitions)
    children = np.random.SeedSequence(seed).spawn(repetitions)
    for k, child in enumerate(children):
        rng = np.random.default_rng(child)
        means = []
        variances = []
        for p in (p_coh, p_deph):
            counts = rng.multinomial(n_br, p)
            mean = float(counts @ outcomes) / n_br
            means.append(mean)
            if n_br > 1:
                variances.append(float(counts @ (outcomes - mean) ** 2) / (n_br - 1))
            else:
                variances.append(0.0)
        estimates[k] = means[0] - means[1]
        standard_errors[k] = math.sqrt((variances[0] + variances[1]) / n_br)

    span = float(outcomes[-1] - outcomes[0])
    return MonteCarloReport(
        estimate=float(estimates.mean()),
        empirical_variance=float(estimates.var(ddof=1)) if repetitions > 1 else float("nan"),
        bound_variance=span**2 / (2.0 * n_br),
        estimates=estimates,
        standard_errors=standard_errors,
        seed=int(seed),
        n_br=int(n_br),
        repetitions=int(repetitions),
    )
