"""Driven two-level benchmark.

The qubit sweeps its bias through an avoided crossing with exact
counterdiabatic assistance; error models perturb the drive. Diagnostics:
the Bloch decomposition of the pulled-back Hamiltonian (whose transverse
part carries the maximal coherent endpoint signal |h_perp|/2), the
ground-to-excited transition probability, phase-swept Kirkwood-Dirac and
Margenau-Hill witnesses, and the characteristic-function gap.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .operators import SpectralDecomposition, dephase, hermitian_eigensystem, pulled_back
from .propagation import DEFAULT_STEPS, propagate_unitary
from .protocols import ErrorModel, ProtocolSpec, qubit_benchmark, qubit_hamiltonian, qubit_terms
from .quasiprob import KDMatrix, characteristic_profile, kd_tpm_deviation, kd_weights, mh_negativity, tpm_weights

__all__ = [
    "BlochDecomposition",
    "WitnessReport",
    "QubitSweepPoint",
    "propagate",
    "reference_hamiltonians",
    "bloch_endpoint",
    "transition_probability",
    "equatorial_probe",
    "phase_swept_witnesses",
    "chi_gap_profile",
    "qubit_sweep",
]


@dataclass(frozen=True)
class BlochDecomposition:
    """Pulled-back Hamiltonian split in the initial energy eigenframe.

    H_H = (identity_part * I + h_parallel * sigma_z' + h_perp . sigma_perp')/2
    where the primed Paulis act in the gauge-fixed eigenbasis of H_0(0) with
    +z' along the initial ground state (ascending energy order). The
    transverse magnitude bounds the coherent endpoint signal over equatorial
    probes: max_phi |DeltaW_coh| = |h_perp|/2.
    """

    identity_part: float
    h_parallel: float
    h_perp: np.ndarray

    @property
    def half_h_perp(self) -> float:
        return float(np.hypot(self.h_perp[0], self.h_perp[1])) / 2.0

    def assemble(self, initial_spec: SpectralDecomposition) -> np.ndarray:
        """Rebuild H_H in the computational basis (consistency checks)."""
        v = initial_spec.vectors
        m = 0.5 * np.array(
            [
                [self.identity_part + self.h_parallel, self.h_perp[0] - 1j * self.h_perp[1]],
                [self.h_perp[0] + 1j * self.h_perp[1], self.identity_part - self.h_parallel],
            ],
            dtype=complex,
        )
        return v @ m @ v.conj().T


@dataclass(frozen=True)
class WitnessReport:
    """Phase-swept KD/MH witnesses with the matrices behind each maximum."""

    phases: np.ndarray
    d_values: np.ndarray
    n_values: np.ndarray
    im_values: np.ndarray
    d_max: float
    d_argmax: float
    n_max: float
    n_argmax: float
    im_max: float
    im_argmax: float
    q_at_d_argmax: KDMatrix
    q_at_n_argmax: KDMatrix
    q_at_im_argmax: KDMatrix
    tpm: np.ndarray


@dataclass(frozen=True)
class QubitSweepPoint:
    epsilon: float
    half_h_perp: float
    p_transition: float
    d_kd_max: float
    n_mh_max: float
    im_sum_max: float
    witnesses: WitnessReport


def propagate(spec: ProtocolSpec, steps: int = DEFAULT_STEPS) -> np.ndarray:
    if spec.system != "qubit":
        raise ValidationError("propagate needs a qubit spec")
    return propagate_unitary(qubit_terms(spec), 0.0, spec.tau, steps)


def reference_hamiltonians(spec: ProtocolSpec) -> tuple[np.ndarray, np.ndarray]:
    """Nominal H_0(0) and H_0(tau).

    Every error shape vanishes at the endpoints (the ramp derivative and the
    distortion bump are zero there), so evaluating the implemented
    Hamiltonian at t = 0 and t = tau recovers the clean references.
    """
    return qubit_hamiltonian(spec, 0.0), qubit_hamiltonian(spec, spec.tau)


def bloch_endpoint(
    u: np.ndarray, spec: ProtocolSpec, initial_spec: SpectralDecomposition | None = None
) -> BlochDecomposition:
    """Bloch split of H_H = U^dag H_0(tau) U in the initial eigenframe."""
    h0i, h0f = reference_hamiltonians(spec)
    spec0 = initial_spec if initial_spec is not None else hermitian_eigensystem(h0i)
    v = spec0.vectors
    m = v.conj().T @ pulled_back(u, h0f) @ v
    return BlochDecomposition(
        identity_part=float(np.trace(m).real),
        h_parallel=float((m[0, 0] - m[1, 1]).real),
        h_perp=np.array([2.0 * m[0, 1].real, -2.0 * m[0, 1].imag]),
    )


def transition_probability(u: np.ndarray, spec: ProtocolSpec) -> float:
    """Ground(0) to excited(tau) transition probability |<e_tau|U|g_0>|^2."""
    h0i, h0f = reference_hamiltonians(spec)
    ground = hermitian_eigensystem(h0i).vectors[:, 0]
    excited = hermitian_eigensystem(h0f).vectors[:, -1]
    return float(np.abs(excited.conj() @ u @ ground) ** 2)


def equatorial_probe(
    spec: ProtocolSpec, phi: float, initial_spec: SpectralDecomposition | None = None
) -> np.ndarray:
    """Density matrix of (|g_0> + e^{i phi} |e_0>)/sqrt(2).

    Uses the same gauge-fixed eigenvectors as :func:`bloch_endpoint`, so the
    probe's transverse Bloch vector is (cos phi, sin phi) in that frame.
    """
    if initial_spec is None:
        initial_spec = hermitian_eigensystem(reference_hamiltonians(spec)[0])
    v = initial_spec.vectors
    psi = (v[:, 0] + np.exp(1j * phi) * v[:, 1]) / np.sqrt(2.0)
    return np.outer(psi, psi.conj())


def phase_swept_witnesses(
    u: np.ndarray, spec: ProtocolSpec, phases: np.ndarray | None = None
) -> WitnessReport:
    """KD/MH witnesses maximized over the equatorial probe phase.

    Sweeps D(phi) = sum |q - p|, N(phi) = sum max(0, -Re q), and
    I(phi) = sum |Im q|; records the maxima, their phases, and the full KD
    matrices at each argmax (the figure-style fingerprints).
    """
    from .analysis import uniform_phase_grid

    if phases is None:
        phases = uniform_phase_grid(721)
    phases = np.asarray(phases, dtype=float)
    if phases.size == 0:
        raise ValidationError("phase grid must not be empty")
    h0i, h0f = reference_hamiltonians(spec)
    spec0 = hermitian_eigensystem(h0i)
    spec_tau = hermitian_eigensystem(h0f)
    # TPM weights are phase-independent (the dephased probe is I/2).
    p = tpm_weights(u, spec0, spec_tau, equatorial_probe(spec, 0.0, spec0))

    q_list = [
        kd_weights(u, spec0, spec_tau, equatorial_probe(spec, phi, spec0)) for phi in phases
    ]
    d_values = np.array([kd_tpm_deviation(q, p) for q in q_list])
    n_values = np.array([mh_negativity(q) for q in q_list])
    im_values = np.array([float(np.sum(np.abs(q.q.imag))) for q in q_list])

    i_d, i_n, i_im = (int(np.argmax(v)) for v in (d_values, n_values, im_values))
    return WitnessReport(
        phases=phases,
        d_values=d_values,
        n_values=n_values,
        im_values=im_values,
        d_max=float(d_values[i_d]),
        d_argmax=float(phases[i_d]),
        n_max=float(n_values[i_n]),
        n_argmax=float(phases[i_n]),
        im_max=float(im_values[i_im]),
        im_argmax=float(phases[i_im]),
        q_at_d_argmax=q_list[i_d],
        q_at_n_argmax=q_list[i_n],
        q_at_im_argmax=q_list[i_im],
        tpm=p,
    )


def chi_gap_profile(
    u: np.ndarray, spec: ProtocolSpec, rho: np.ndarray, u_values: np.ndarray | None = None
) -> np.ndarray:
    """|chi_rho(u) - chi_dephased(u)| over a grid; shape (len(u_values), 2).

    The gap vanishes identically exactly when the pulled-back final
    Hamiltonian commutes with the initial spectral projectors.
    """
    if u_values is None:
        u_values = np.linspace(0.0, 10.0, 101)
    u_values = np.asarray(u_values, dtype=float)
    h0i, h0f = reference_hamiltonians(spec)
    rho_deph = dephase(np.asarray(rho, dtype=complex), hermitian_eigensystem(h0i))
    chi = characteristic_profile(u, h0i, h0f, rho, u_values)
    chi_deph = characteristic_profile(u, h0i, h0f, rho_deph, u_values)
    return np.column_stack([u_values, np.abs(chi - chi_deph)])


def qubit_sweep(
    epsilons,
    error_kind: str = "missing_cd",
    steps: int = DEFAULT_STEPS,
    phase_points: int = 721,
    include_cd: bool = True,
) -> list[QubitSweepPoint]:
    """Benchmark sweep over error amplitudes at the standard parameters."""
    from .analysis import uniform_phase_grid

    phases = uniform_phase_grid(phase_points)
    points = []
    for eps in epsilons:
        spec = qubit_benchmark(
            include_cd=include_cd, error=ErrorModel(kind=error_kind, epsilon=float(eps))
        )
        u = propagate(spec, steps)
        witnesses = phase_swept_witnesses(u, spec, phases)
        points.append(
            QubitSweepPoint(
                epsilon=float(eps),
                half_h_perp=bloch_endpoint(u, spec).half_h_perp,
                p_transition=transition_probability(u, spec),
                d_kd_max=witnesses.d_max,
                n_mh_max=witnesses.n_max,
                im_sum_max=witnesses.im_max,
                witnesses=witnesses,
            )
        )
    return points
