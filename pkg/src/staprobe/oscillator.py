"""Parametric-oscillator benchmark.

Two independent routes to the same endpoint physics:

1. Symplectic route -- integrate the 2x2 Heisenberg flow of (x, p), extract
   Bogoliubov coefficients (mu, nu), and evaluate every endpoint quantity
   in closed form.
2. Truncated-Fock route -- build the dim x dim Hamiltonian matrices, run the
   full unitary propagation, and feed the generic endpoint machinery.

Route 2 exists purely to check route 1; their agreement is the benchmark's
primary correctness oracle, so the two implementations share no dynamics
code.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import QualityError, ValidationError
from .propagation import DEFAULT_STEPS, LinearTerms, propagate_linear, propagate_unitary
from .protocols import ErrorModel, ProtocolSpec, oscillator_hamiltonian_terms
from .quasiprob import EndpointReport, endpoint_means

__all__ = [
    "DEFAULT_FOCK_DIM",
    "BogoliubovPair",
    "EndpointCoefficients",
    "FockFingerprint",
    "OscillatorSweepPoint",
    "propagate_symplectic",
    "bogoliubov_from_symplectic",
    "endpoint_coefficients",
    "tpm_mean",
    "coherent_correction",
    "phase_probe_a_squared",
    "phase_probe_occupation",
    "phase_probe_state",
    "delta_w_profile",
    "ladder",
    "fock_hamiltonian_terms",
    "fock_reference_hamiltonians",
    "fock_h_off",
    "fock_propagation_oracle",
    "oscillator_sweep",
]

DEFAULT_FOCK_DIM = 40


@dataclass(frozen=True)
class BogoliubovPair:
    """Coefficients of the final-frame ladder operator b = mu a + nu a^dag."""

    mu: complex
    nu: complex

    @property
    def constraint_defect(self) -> float:
        """Deviation from the hyperbolic normalization |mu|^2 - |nu|^2 = 1."""
        return abs(abs(self.mu) ** 2 - abs(self.nu) ** 2 - 1.0)


@dataclass(frozen=True)
class EndpointCoefficients:
    """Endpoint observables of the quadratic drive: Q* = |mu|^2 + |nu|^2,
    C = conj(mu) nu, carrying the final frequency for energy units."""

    q_star: float
    c: complex
    omega_f: float


@dataclass(frozen=True)
class FockFingerprint:
    """Pulled-back Hamiltonian in the number basis and its band structure."""

    h_h: np.ndarray
    h_off: np.ndarray
    band_weights: dict[int, float]


@dataclass(frozen=True)
class OscillatorSweepPoint:
    """One error amplitude of the oscillator sweep (symplectic route)."""

    epsilon: float
    nu_abs: float
    q_star: float
    c: complex
    thetas: np.ndarray
    delta_w_over_omega_f: np.ndarray
    max_abs_delta_w_over_omega_f: float
    theta_argmax: float
    fourier_amplitude_over_omega_f: float


def propagate_symplectic(spec: ProtocolSpec, steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Fundamental solution S of the classical flow, with det S restored to 1.

    Raises a quality error when the raw determinant drifts from 1 by more
    than 1e-6 (the integration is then under-resolved and the Bogoliubov
    extraction would be meaningless).
    """
    if spec.system != "oscillator":
        raise ValidationError("propagate_symplectic needs an oscillator spec")
    from .protocols import oscillator_symplectic_terms

    raw = propagate_linear(oscillator_symplectic_terms(spec), 0.0, spec.tau, steps)
    s = raw.real
    det = float(np.linalg.det(s))
    if abs(det - 1.0) > 1e-6:
        raise QualityError(
            f"symplectic propagation lost det S = 1 (got {det!r}); increase steps"
        )
    return s / np.sqrt(det)


def bogoliubov_from_symplectic(s: np.ndarray, omega_i: float, omega_f: float) -> BogoliubovPair:
    """Extract (mu, nu) from the phase-space map S.

    Writing the final-frame annihilator b = (sqrt(omega_f) x' + i p'/sqrt(omega_f))
    / sqrt(2) with (x', p') = S (x, p) and expanding x, p in the initial-frame
    ladder operators gives the closed-form linear combination below. The
    normalization defect equals |det S - 1|, so it doubles as an
    integration-quality check.
    """
    s = np.asarray(s, dtype=float)
    if s.shape != (2, 2):
        raise ValidationError(f"S must be 2x2, got {s.shape}")
    if omega_i <= 0 or omega_f <= 0:
        raise ValidationError("frequencies must be positive")
    det = float(np.linalg.det(s))
    if abs(det - 1.0) > 1e-6:
        raise QualityError(f"S is not symplectic: det = {det!r}")
    r = np.sqrt(omega_f / omega_i)
    w = np.sqrt(omega_i * omega_f)
    mu = 0.5 * (s[0, 0] * r + s[1, 1] / r + 1j * (s[1, 0] / w - s[0, 1] * w))
    nu = 0.5 * (s[0, 0] * r - s[1, 1] / r + 1j * (s[1, 0] / w + s[0, 1] * w))
    pair = BogoliubovPair(mu=complex(mu), nu=complex(nu))
    if pair.constraint_defect > 1e-6:
        raise QualityError(
            f"Bogoliubov normalization violated by {pair.constraint_defect:.3e}"
        )
    return pair


def endpoint_coefficients(pair: BogoliubovPair, omega_f: float) -> EndpointCoefficients:
    return EndpointCoefficients(
        q_star=abs(pair.mu) ** 2 + abs(pair.nu) ** 2,
        c=np.conj(pair.mu) * pair.nu,
        omega_f=omega_f,
    )


def tpm_mean(coeffs: EndpointCoefficients, omega_i: float, occupation_plus_half: float) -> float:
    """TPM work mean (omega_f Q* - omega_i) <a^dag a + 1/2>; phase-blind."""
    return (coeffs.omega_f * coeffs.q_star - omega_i) * occupation_plus_half


def coherent_correction(coeffs: EndpointCoefficients, a_squared_expectation: complex) -> float:
    """Coherent endpoint correction 2 omega_f Re(conj(C) <a^2>)."""
    return 2.0 * coeffs.omega_f * float(np.real(np.conj(coeffs.c) * a_squared_expectation))


def phase_probe_a_squared(theta: float) -> complex:
    """<a^2> of the probe (|0> + e^{i theta} |2>)/sqrt(2)."""
    return np.exp(1j * theta) / np.sqrt(2.0)


def phase_probe_occupation() -> float:
    """<a^dag a + 1/2> of the phase probe: (0 + 2)/2 + 1/2."""
    return 1.5


def phase_probe_state(theta: float, dim: int) -> np.ndarray:
    """Number-basis amplitudes of (|0> + e^{i theta} |2>)/sqrt(2)."""
    if dim < 3:
        raise ValidationError("phase probe needs dim >= 3")
    psi = np.zeros(dim, dtype=complex)
    psi[0] = 1.0 / np.sqrt(2.0)
    psi[2] = np.exp(1j * theta) / np.sqrt(2.0)
    return psi


def delta_w_profile(coeffs: EndpointCoefficients, thetas: np.ndarray) -> np.ndarray:
    """Coherent correction of the phase probe across a theta grid.

    Equals sqrt(2) omega_f Re(C e^{-i theta}); evaluated through the same
    formula as :func:`coherent_correction` for consistency.
    """
    asq = np.exp(1j * np.asarray(thetas, dtype=float)) / np.sqrt(2.0)
    return 2.0 * coeffs.omega_f * np.real(np.conj(coeffs.c) * asq)


def ladder(dim: int) -> np.ndarray:
    """Annihilation operator truncated to the lowest ``dim`` number states."""
    if dim < 1:
        raise ValidationError("dim must be >= 1")
    return np.diag(np.sqrt(np.arange(1.0, dim)), k=1).astype(complex)


def _position_momentum(dim: int, omega: float) -> tuple[np.ndarray, np.ndarray]:
    a = ladder(dim)
    x = (a + a.conj().T) / np.sqrt(2.0 * omega)
    p = -1j * np.sqrt(omega / 2.0) * (a - a.conj().T)
    return x, p


def fock_hamiltonian_terms(spec: ProtocolSpec, dim: int) -> LinearTerms:
    """H(t) = p^2/2 + omega(t)^2 x^2/2 + cd(t)(xp + px) as dense matrices.

    x and p are built on the omega_i number basis, so the initial reference
    Hamiltonian is exactly diagonal and the probe states are basis states.
    """
    if spec.system != "oscillator":
        raise ValidationError("fock_hamiltonian_terms needs an oscillator spec")
    if dim < 3:
        raise ValidationError("dim must be >= 3")
    x, p = _position_momentum(dim, spec.omega_i)
    kinetic = (p @ p) / 2.0
    half_x2 = (x @ x) / 2.0
    squeeze = x @ p + p @ x

    def coefficients(times: np.ndarray) -> np.ndarray:
        omega, _, cd = oscillator_hamiltonian_terms(spec, times)
        ones = np.ones_like(np.asarray(times, dtype=float))
        return np.column_stack([ones, np.asarray(omega) ** 2, np.asarray(cd)])

    return LinearTerms(matrices=np.stack([kinetic, half_x2, squeeze]), coefficients=coefficients)


def fock_reference_hamiltonians(spec: ProtocolSpec, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncated H_0(0) and H_0(tau) in the omega_i number basis."""
    x, p = _position_momentum(dim, spec.omega_i)
    kinetic = (p @ p) / 2.0
    x2 = x @ x
    return kinetic + spec.omega_i**2 * x2 / 2.0, kinetic + spec.omega_f**2 * x2 / 2.0


def fock_h_off(coeffs: EndpointCoefficients, dim: int) -> FockFingerprint:
    """Pulled-back Hamiltonian omega_f [Q*(a^dag a + 1/2) + C a^dag^2 + C* a^2]
    in the number basis, its off-diagonal part, and band-resolved weights
    B_dn = sum_n |(H_off)_{n+dn, n}| / omega_f for dn in [-4, 4]."""
    if dim < 4:
        raise ValidationError("fingerprint needs dim >= 4")
    a = ladder(dim)
    adag = a.conj().T
    number = adag @ a
    h_h = coeffs.omega_f * (
        coeffs.q_star * (number + 0.5 * np.eye(dim))
        + coeffs.c * (adag @ adag)
        + np.conj(coeffs.c) * (a @ a)
    )
    h_off = h_h - np.diag(np.diag(h_h))
    weights = {
        dn: float(np.sum(np.abs(np.diagonal(h_off, offset=-dn)))) / coeffs.omega_f
        for dn in range(-4, 5)
        if dn != 0
    }
    weights[0] = 0.0
    return FockFingerprint(h_h=h_h, h_off=h_off, band_weights=dict(sorted(weights.items())))


def fock_propagation_oracle(
    spec: ProtocolSpec,
    state: np.ndarray,
    dim: int = DEFAULT_FOCK_DIM,
    steps: int = DEFAULT_STEPS,
    check_truncation: bool = True,
) -> EndpointReport:
    """Brute-force endpoint report: full unitary propagation in a truncated
    number basis, no Bogoliubov shortcut anywhere.

    ``state`` is a normalized amplitude vector in the number basis (length
    at most dim). With ``check_truncation`` the computation is repeated at
    dim + 10 and a quality error is raised if the endpoint values move by
    more than 1e-6.
    """
    state = np.asarray(state, dtype=complex).ravel()
    if len(state) > dim:
        raise ValidationError(f"state has {len(state)} amplitudes but dim = {dim}")
    if abs(np.linalg.norm(state) - 1.0) > 1e-9:
        raise ValidationError("state must be normalized")

    def run(d: int) -> EndpointReport:
        psi = np.zeros(d, dtype=complex)
        psi[: len(state)] = state
        rho = np.outer(psi, psi.conj())
        u = propagate_unitary(fock_hamiltonian_terms(spec, d), 0.0, spec.tau, steps)
        h0i, h0f = fock_reference_hamiltonians(spec, d)
        return endpoint_means(u, h0i, h0f, rho)

    report = run(dim)
    if check_truncation:
        wider = run(dim + 10)
        drift = max(
            abs(wider.w_tpm - report.w_tpm), abs(wider.delta_w_coh - report.delta_w_coh)
        )
        if drift > 1e-6:
            raise QualityError(
                f"truncation-sensitive result: dim {dim} vs {dim + 10} differ by {drift:.3e}"
            )
    return report


def oscillator_sweep(
    epsilons,
    error_kind: str = "missing_cd",
    steps: int = DEFAULT_STEPS,
    theta_points: int = 721,
    include_cd: bool = True,
) -> list[OscillatorSweepPoint]:
    """Symplectic-route sweep over error amplitudes (theta handled analytically)."""
    from .analysis import phase_maximize, uniform_phase_grid
    from .protocols import oscillator_benchmark

    thetas = uniform_phase_grid(theta_points)
    points = []
    for eps in epsilons:
        spec = oscillator_benchmark(
            include_cd=include_cd, error=ErrorModel(kind=error_kind, epsilon=float(eps))
        )
        s = propagate_symplectic(spec, steps)
        pair = bogoliubov_from_symplectic(s, spec.omega_i, spec.omega_f)
        coeffs = endpoint_coefficients(pair, spec.omega_f)
        profile = delta_w_profile(coeffs, thetas) / spec.omega_f
        optimum = phase_maximize(zip(thetas, np.abs(profile)))
        fourier = phase_maximize(zip(thetas, profile)).fourier_amplitude
        points.append(
            OscillatorSweepPoint(
                epsilon=float(eps),
                nu_abs=abs(pair.nu),
                q_star=coeffs.q_star,
                c=coeffs.c,
                thetas=thetas,
                delta_w_over_omega_f=profile,
                max_abs_delta_w_over_omega_f=optimum.value,
                theta_argmax=optimum.phase,
                fourier_amplitude_over_omega_f=fourier,
            )
        )
    return points
