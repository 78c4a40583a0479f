"""Endpoint work quasistatistics: means, bounds, characteristic functions,
and Kirkwood-Dirac / Margenau-Hill weights.

Everything here compares two readings of the energy change over a drive:
the two-point-measurement (TPM) mean, whose first projective measurement
erases initial coherences, and the coherence-retaining quasimean evaluated
on the undisturbed state. Their difference is carried entirely by the
off-diagonal parts of the pulled-back final Hamiltonian and of the state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .operators import (
    SpectralDecomposition,
    dephase,
    hermitian_eigensystem,
    offdiagonal_part,
    operator_norm,
    pulled_back,
    require_density,
    require_hermitian,
    require_unitary,
    trace_norm,
)

__all__ = [
    "EndpointReport",
    "KDMatrix",
    "endpoint_means",
    "characteristic_function",
    "characteristic_profile",
    "kd_weights",
    "tpm_weights",
    "mh_negativity",
    "kd_tpm_deviation",
]


@dataclass(frozen=True)
class EndpointReport:
    """First moments of the endpoint energy change for one (U, rho) pair.

    w_tpm:       mean over the dephased state (the TPM value).
    w_coh:       quasimean over the undisturbed state.
    delta_w_coh: coherent correction, equal to w_coh - w_tpm and to
                 Tr(H_off rho_off).
    bound:       operator-norm x trace-norm bound on |delta_w_coh|.
    bound_l1:    max-element x coherence-l1 bound; None when the initial
                 spectrum has degenerate blocks (no canonical element basis).
    """

    w_tpm: float
    w_coh: float
    delta_w_coh: float
    bound: float
    bound_l1: float | None


@dataclass(frozen=True)
class KDMatrix:
    """Kirkwood-Dirac weights q[m, n] = Tr(P_m^H P_n^0 rho).

    Index m runs over final-energy blocks pulled back through the drive,
    n over initial-energy blocks. Margenau-Hill weights are q.real.
    """

    q: np.ndarray
    initial_energies: np.ndarray
    final_energies: np.ndarray

    @property
    def mh(self) -> np.ndarray:
        return self.q.real

    def to_json(self) -> dict:
        return {
            "re": self.q.real.tolist(),
            "im": self.q.imag.tolist(),
            "initial_energies": self.initial_energies.tolist(),
            "final_energies": self.final_energies.tolist(),
        }


def _real_trace(m: np.ndarray, label: str, atol: float = 1e-9) -> float:
    tr = complex(np.trace(m))
    if abs(tr.imag) > atol:
        raise ValidationError(f"{label} has non-real trace {tr!r}")
    return tr.real


def endpoint_means(
    u: np.ndarray,
    h0_initial: np.ndarray,
    h0_final: np.ndarray,
    rho: np.ndarray,
    initial_spec: SpectralDecomposition | None = None,
) -> EndpointReport:
    """TPM and coherent endpoint means plus the two analytic bounds.

    The pulled-back Hamiltonian H_H = U^dag H0_final U is compared against
    H0_initial; dephasing uses the spectral projectors of H0_initial (pass
    ``initial_spec`` to reuse a cached decomposition).
    """
    u = require_unitary(u, name="U")
    h0_initial = require_hermitian(h0_initial, name="H0_initial")
    h0_final = require_hermitian(h0_final, name="H0_final")
    rho = require_density(rho, name="rho")
    if not (u.shape == h0_initial.shape == h0_final.shape == rho.shape):
        raise ValidationError("U, H0_initial, H0_final, rho must share one dimension")
    spec0 = initial_spec if initial_spec is not None else hermitian_eigensystem(h0_initial)

    h_h = pulled_back(u, h0_final)
    work_op = h_h - h0_initial
    rho_diag = dephase(rho, spec0)
    w_tpm = _real_trace(work_op @ rho_diag, "TPM mean")
    w_coh = _real_trace(work_op @ rho, "coherent quasimean")

    h_off = offdiagonal_part(h_h, spec0)
    rho_off = rho - rho_diag
    delta = _real_trace(h_off @ rho_off, "coherent correction")
    bound = operator_norm(h_off) * trace_norm(rho_off)

    bound_l1 = None
    if spec0.nondegenerate:
        v = spec0.vectors
        h_basis = v.conj().T @ h_h @ v
        rho_basis = v.conj().T @ rho @ v
        off_mask = ~np.eye(v.shape[0], dtype=bool)
        bound_l1 = float(np.max(np.abs(h_basis[off_mask])) * np.sum(np.abs(rho_basis[off_mask])))

    return EndpointReport(
        w_tpm=w_tpm, w_coh=w_coh, delta_w_coh=delta, bound=bound, bound_l1=bound_l1
    )


def characteristic_function(
    u: np.ndarray, h0_initial: np.ndarray, h0_final: np.ndarray, rho: np.ndarray, u_value: float
) -> complex:
    """chi_rho(u) = Tr[exp(iu H_H) exp(-iu H0_initial) rho] at one u."""
    return complex(
        characteristic_profile(u, h0_initial, h0_final, rho, np.array([u_value]))[0]
    )


def characteristic_profile(
    u: np.ndarray,
    h0_initial: np.ndarray,
    h0_final: np.ndarray,
    rho: np.ndarray,
    u_values: np.ndarray,
) -> np.ndarray:
    """chi_rho over an array of u values, diagonalizing each operator once."""
    u = require_unitary(u, name="U")
    spec0 = hermitian_eigensystem(require_hermitian(h0_initial, name="H0_initial"))
    spec_h = hermitian_eigensystem(pulled_back(u, require_hermitian(h0_final, name="H0_final")))
    rho = np.asarray(rho, dtype=complex)
    out = np.empty(len(u_values), dtype=complex)
    for i, uv in enumerate(np.asarray(u_values, dtype=float)):
        left = sum(
            np.exp(1j * uv * e) * p for e, p in zip(spec_h.energies, spec_h.projectors)
        )
        right = sum(
            np.exp(-1j * uv * e) * p for e, p in zip(spec0.energies, spec0.projectors)
        )
        out[i] = np.trace(left @ right @ rho)
    return out


def kd_weights(
    u: np.ndarray,
    initial_spec: SpectralDecomposition,
    final_spec: SpectralDecomposition,
    rho: np.ndarray,
) -> KDMatrix:
    """Full complex KD matrix for the drive U and initial state rho.

    Final-energy projectors are pulled back, P_m^H = U^dag P_m^tau U, so all
    weights refer to operators at the initial time.
    """
    u = require_unitary(u, name="U")
    rho = np.asarray(rho, dtype=complex)
    pulled = [pulled_back(u, p) for p in final_spec.projectors]
    q = np.empty((len(pulled), len(initial_spec.projectors)), dtype=complex)
    for m, pm in enumerate(pulled):
        for n, pn in enumerate(initial_spec.projectors):
            q[m, n] = np.trace(pm @ pn @ rho)
    return KDMatrix(
        q=q, initial_energies=initial_spec.energies, final_energies=final_spec.energies
    )


def tpm_weights(
    u: np.ndarray,
    initial_spec: SpectralDecomposition,
    final_spec: SpectralDecomposition,
    rho: np.ndarray,
) -> np.ndarray:
    """Genuine TPM joint probabilities: KD weights of the dephased state."""
    q = kd_weights(u, initial_spec, final_spec, dephase(rho, initial_spec))
    p = q.q
    if np.max(np.abs(p.imag)) > 1e-12:
        raise ValidationError("TPM weights acquired an imaginary part")
    return p.real


def mh_negativity(q: KDMatrix | np.ndarray) -> float:
    """Total negativity of the Margenau-Hill weights: sum max(0, -Re q)."""
    values = q.q if isinstance(q, KDMatrix) else np.asarray(q)
    return float(np.sum(np.maximum(0.0, -values.real)))


def kd_tpm_deviation(q: KDMatrix | np.ndarray, p: np.ndarray) -> float:
    """Total KD-vs-TPM deviation: sum |q_mn - p_mn| in complex modulus."""
    values = q.q if isinstance(q, KDMatrix) else np.asarray(q)
    if values.shape != np.asarray(p).shape:
        raise ValidationError("q and p must have matching shapes")
    return float(np.sum(np.abs(values - p)))
