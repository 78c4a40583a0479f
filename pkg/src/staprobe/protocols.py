"""Drive schedules, counterdiabatic terms, and injectable control errors.

A protocol sweeps one parameter (oscillator frequency or qubit bias) along a
quintic ramp, optionally assisted by the counterdiabatic term that makes the
evolution exactly transitionless. Error models perturb the implemented drive
while leaving the endpoint reference Hamiltonians untouched (every error
shape vanishes at t = 0 and t = tau).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .exceptions import ValidationError
from .propagation import LinearTerms

__all__ = [
    "ERROR_KINDS",
    "RampSchedule",
    "ErrorModel",
    "ProtocolSpec",
    "ramp_value",
    "oscillator_hamiltonian_terms",
    "qubit_coefficients",
    "qubit_hamiltonian",
    "qubit_terms",
    "oscillator_symplectic_terms",
    "oscillator_benchmark",
    "qubit_benchmark",
    "spec_to_json",
    "spec_from_json",
    "load_spec",
]

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

ERROR_KINDS = ("none", "missing_cd", "transverse_spurious", "commuting_phase", "waveform_distortion")
#: The two spurious-control models are qubit constructions; the oscillator
#: benchmark exercises the CD-amplitude and waveform classes only.
_OSCILLATOR_ERROR_KINDS = ("none", "missing_cd", "waveform_distortion")


@dataclass(frozen=True)
class RampSchedule:
    """Quintic interpolation of one control parameter over [0, tau]."""

    tau: float
    start: float
    end: float
    kind: str = "quintic"

    def __post_init__(self):
        if self.tau <= 0:
            raise ValidationError(f"tau must be positive, got {self.tau}")
        if self.kind != "quintic":
            raise ValidationError(f"unknown ramp kind {self.kind!r}")

    def parameter(self, t):
        """Swept parameter value and time derivative at t."""
        s, s_dot = ramp_value(self, t)
        span = self.end - self.start
        return self.start + span * s, span * s_dot


def ramp_value(schedule: RampSchedule, t):
    """Dimensionless progress s(t) and its analytic derivative.

    s(t) = 10u^3 - 15u^4 + 6u^5 with u = t/tau, so s and s_dot vanish at
    t = 0 and s(tau) = 1, s_dot(tau) = 0 exactly. Accepts scalars or arrays.
    """
    t_arr = np.asarray(t, dtype=float)
    tol = 1e-12 * schedule.tau
    if np.any(t_arr < -tol) or np.any(t_arr > schedule.tau + tol):
        raise ValidationError(f"time outside [0, {schedule.tau}]")
    u = np.clip(t_arr / schedule.tau, 0.0, 1.0)
    s = u**3 * (10.0 + u * (-15.0 + 6.0 * u))
    s_dot = 30.0 * u**2 * (1.0 - u) ** 2 / schedule.tau
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        return float(s), float(s_dot)
    return s, s_dot


@dataclass(frozen=True)
class ErrorModel:
    """One injectable imperfection of the implemented drive.

    kind: none | missing_cd | transverse_spurious | commuting_phase |
    waveform_distortion. With epsilon = 0 every model reproduces the exact
    protocol identically (same Hamiltonian values at every time).
    """

    kind: str = "none"
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in ERROR_KINDS:
            raise ValidationError(f"unknown error kind {self.kind!r}")
        if self.epsilon < 0:
            raise ValidationError(f"epsilon must be >= 0, got {self.epsilon}")


@dataclass(frozen=True)
class ProtocolSpec:
    """Complete description of one drive: system, ramp, CD switch, error."""

    system: str
    ramp: RampSchedule
    delta: float | None = None
    include_cd: bool = True
    error: ErrorModel = field(default_factory=ErrorModel)

    def __post_init__(self):
        if self.system not in ("oscillator", "qubit"):
            raise ValidationError(f"unknown system {self.system!r}")
        if self.system == "qubit" and self.delta is None:
            raise ValidationError("qubit spec requires delta")
        if self.system == "oscillator":
            if self.error.kind not in _OSCILLATOR_ERROR_KINDS:
                raise ValidationError(
                    f"error kind {self.error.kind!r} is not defined for the oscillator"
                )
            # Positivity of the effective frequency, checked on a dense grid.
            grid = np.linspace(0.0, self.tau, 1001)
            omega = _effective_parameter(self, grid)[2]
            if np.any(omega <= 0):
                raise ValidationError("omega(t) must stay positive on [0, tau]")

    @property
    def tau(self) -> float:
        return self.ramp.tau

    @property
    def omega_i(self) -> float:
        return self.ramp.start

    @property
    def omega_f(self) -> float:
        return self.ramp.end

    @property
    def lambda_i(self) -> float:
        return self.ramp.start

    @property
    def lambda_f(self) -> float:
        return self.ramp.end

    def with_error(self, kind: str, epsilon: float) -> "ProtocolSpec":
        return replace(self, error=ErrorModel(kind=kind, epsilon=epsilon))


def _effective_parameter(spec: ProtocolSpec, t):
    """Nominal swept parameter, its nominal derivative, and the implemented value.

    waveform_distortion shifts the implemented waveform by
    epsilon * (end - start) * sin^2(pi t / tau) while the CD term keeps
    tracking the nominal ramp (the controller believes the nominal waveform).
    """
    nominal, nominal_dot = spec.ramp.parameter(t)
    effective = nominal
    if spec.error.kind == "waveform_distortion" and spec.error.epsilon != 0.0:
        span = spec.ramp.end - spec.ramp.start
        bump = np.sin(np.pi * np.asarray(t, dtype=float) / spec.tau) ** 2
        effective = nominal + spec.error.epsilon * span * bump
    return nominal, nominal_dot, effective


def _cd_scale(spec: ProtocolSpec) -> float:
    if not spec.include_cd:
        return 0.0
    if spec.error.kind == "missing_cd":
        return 1.0 - spec.error.epsilon
    return 1.0


def oscillator_hamiltonian_terms(spec: ProtocolSpec, t):
    """(omega, omega_dot, cd_coefficient) of H = p^2/2 + omega^2 x^2/2 + cd*(xp+px).

    omega is the implemented (possibly distorted) frequency; omega_dot is the
    nominal ramp derivative that generates the CD term; cd_coefficient is
    -omega_dot/(4 omega) scaled by the CD switch and the missing_cd model.
    """
    if spec.system != "oscillator":
        raise ValidationError("oscillator_hamiltonian_terms needs an oscillator spec")
    omega_nom, omega_dot, omega_eff = _effective_parameter(spec, t)
    if np.any(np.asarray(omega_eff) <= 0):
        raise ValidationError("omega(t) must stay positive")
    cd = -_cd_scale(spec) * omega_dot / (4.0 * omega_nom)
    return omega_eff, omega_dot, cd


def qubit_coefficients(spec: ProtocolSpec, t):
    """Pauli coefficients (cx, cy, cz) of H(t) = (cx sx + cy sy + cz sz)/2.

    Base drive: cx = delta, cz = lambda(t); exact CD term cy =
    -delta*lambda_dot/(delta^2 + lambda^2). Error models:
      missing_cd           -- CD scaled by (1 - epsilon);
      transverse_spurious  -- adds epsilon * s_dot(t)*tau along y;
      commuting_phase      -- adds epsilon * s_dot(t)*tau * H_0(t), which is
                              diagonal in the instantaneous adiabatic frame;
      waveform_distortion  -- implemented lambda(t) acquires a sin^2 bump.
    """
    if spec.system != "qubit":
        raise ValidationError("qubit_coefficients needs a qubit spec")
    t_arr = np.asarray(t, dtype=float)
    lam_nom, lam_dot, lam_eff = _effective_parameter(spec, t_arr)
    delta = spec.delta
    cx = np.full_like(t_arr, delta, dtype=float)
    cz = np.asarray(lam_eff, dtype=float).copy()
    cy = -_cd_scale(spec) * delta * lam_dot / (delta**2 + lam_nom**2)
    cy = np.asarray(cy, dtype=float).copy()
    eps = spec.error.epsilon
    if eps != 0.0:
        _, s_dot = ramp_value(spec.ramp, t_arr)
        bump = s_dot * spec.tau
        if spec.error.kind == "transverse_spurious":
            cy += eps * bump
        elif spec.error.kind == "commuting_phase":
            cx += eps * bump * delta
            cz += eps * bump * lam_nom
    return cx, cy, cz


def qubit_hamiltonian(spec: ProtocolSpec, t: float) -> np.ndarray:
    """Implemented 2x2 Hamiltonian at a single time."""
    cx, cy, cz = qubit_coefficients(spec, float(t))
    return 0.5 * (float(cx) * PAULI_X + float(cy) * PAULI_Y + float(cz) * PAULI_Z)


def qubit_terms(spec: ProtocolSpec) -> LinearTerms:
    """Kernel-ready decomposition of the qubit drive over the Pauli basis."""

    def coefficients(times: np.ndarray) -> np.ndarray:
        cx, cy, cz = qubit_coefficients(spec, times)
        return np.column_stack([cx, cy, cz])

    return LinearTerms(
        matrices=0.5 * np.stack([PAULI_X, PAULI_Y, PAULI_Z]), coefficients=coefficients
    )


def oscillator_symplectic_terms(spec: ProtocolSpec) -> LinearTerms:
    """Generator of the Heisenberg flow d/dt (x, p) = A(t) (x, p).

    From H = p^2/2 + omega^2 x^2/2 + g(t)(xp + px):
    x_dot = p + 2 g x, p_dot = -omega^2 x - 2 g p, i.e.
    A(t) = [[2g, 1], [-omega^2, -2g]] with g the scaled CD coefficient.
    """
    if spec.system != "oscillator":
        raise ValidationError("oscillator_symplectic_terms needs an oscillator spec")
    matrices = np.stack(
        [
            np.array([[2.0, 0.0], [0.0, -2.0]], dtype=complex),
            np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex),
            np.array([[0.0, 0.0], [-1.0, 0.0]], dtype=complex),
        ]
    )

    def coefficients(times: np.ndarray) -> np.ndarray:
        omega, _, cd = oscillator_hamiltonian_terms(spec, times)
        ones = np.ones_like(np.asarray(times, dtype=float))
        return np.column_stack([cd, ones, np.asarray(omega) ** 2])

    return LinearTerms(matrices=matrices, coefficients=coefficients)


def oscillator_benchmark(
    include_cd: bool = True, error: ErrorModel | None = None
) -> ProtocolSpec:
    """Frequency ramp 1 -> 2 over tau = pi with the quintic schedule."""
    return ProtocolSpec(
        system="oscillator",
        ramp=RampSchedule(tau=np.pi, start=1.0, end=2.0),
        include_cd=include_cd,
        error=error or ErrorModel(),
    )


def qubit_benchmark(include_cd: bool = True, error: ErrorModel | None = None) -> ProtocolSpec:
    """Bias sweep lambda: -4 -> 4 at delta = 1 over tau = 6."""
    return ProtocolSpec(
        system="qubit",
        ramp=RampSchedule(tau=6.0, start=-4.0, end=4.0),
        delta=1.0,
        include_cd=include_cd,
        error=error or ErrorModel(),
    )


def spec_to_json(spec: ProtocolSpec) -> dict:
    """Flat JSON form with a fixed key set shared by both systems."""
    oscillator = spec.system == "oscillator"
    return {
        "system": spec.system,
        "omega_i": spec.ramp.start if oscillator else None,
        "omega_f": spec.ramp.end if oscillator else None,
        "delta": spec.delta,
        "lambda_i": None if oscillator else spec.ramp.start,
        "lambda_f": None if oscillator else spec.ramp.end,
        "tau": spec.tau,
        "ramp": spec.ramp.kind,
        "include_cd": spec.include_cd,
        "error_kind": spec.error.kind,
        "epsilon": spec.error.epsilon,
    }


def spec_from_json(data: dict) -> ProtocolSpec:
    try:
        system = data["system"]
        tau = float(data["tau"])
    except KeyError as exc:
        raise ValidationError(f"protocol JSON missing key {exc}") from exc
    kind = data.get("ramp", "quintic")
    if system == "oscillator":
        start, end = data.get("omega_i"), data.get("omega_f")
    else:
        start, end = data.get("lambda_i"), data.get("lambda_f")
    if start is None or end is None:
        raise ValidationError(f"protocol JSON lacks ramp endpoints for system {system!r}")
    delta = data.get("delta")
    return ProtocolSpec(
        system=system,
        ramp=RampSchedule(tau=tau, start=float(start), end=float(end), kind=kind),
        delta=None if delta is None else float(delta),
        include_cd=bool(data.get("include_cd", True)),
        error=ErrorModel(
            kind=data.get("error_kind", "none"), epsilon=float(data.get("epsilon", 0.0))
        ),
    )


def load_spec(path: str | Path) -> ProtocolSpec:
    with open(path, encoding="utf-8") as fh:
        return spec_from_json(json.load(fh))
