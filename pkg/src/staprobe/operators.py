"""Finite-dimensional operator utilities.

Everything downstream works with plain complex ndarrays; this module owns
the structural checks (hermiticity, unitarity, density-matrix validity),
spectral decompositions with explicit degenerate blocks, basis dephasing,
Heisenberg pullback, and matrix phase factors.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError

__all__ = [
    "require_square",
    "require_hermitian",
    "require_unitary",
    "require_density",
    "SpectralDecomposition",
    "hermitian_eigensystem",
    "dephase",
    "offdiagonal_part",
    "pulled_back",
    "evolve_phase",
    "nearest_unitary",
    "operator_norm",
    "trace_norm",
]

#: Relative scale used to group nearly equal eigenvalues into one block.
DEGENERACY_RTOL = 1e-9


def require_square(m: np.ndarray, name: str = "operator") -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {m.shape}")
    return m.astype(np.complex128, copy=False)


def require_hermitian(m: np.ndarray, atol: float = 1e-10, name: str = "operator") -> np.ndarray:
    """Return ``m`` as complex128 after checking H = H^dagger within ``atol``."""
    m = require_square(m, name)
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > atol:
        raise ValidationError(f"{name} is not Hermitian: max |M - M^dag| = {dev:.3e}")
    return m


def require_unitary(u: np.ndarray, atol: float = 1e-8, name: str = "operator") -> np.ndarray:
    u = require_square(u, name)
    dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if dev > atol:
        raise ValidationError(f"{name} is not unitary: max |U^dag U - 1| = {dev:.3e}")
    return u


def require_density(rho: np.ndarray, atol: float = 1e-8, name: str = "state") -> np.ndarray:
    """Check hermiticity, unit trace and positivity (eigenvalues >= -atol)."""
    rho = require_hermitian(rho, atol=atol, name=name)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > atol:
        raise ValidationError(f"{name} has trace {tr!r}, expected 1")
    w = np.linalg.eigvalsh(rho)
    if w.min() < -atol:
        raise ValidationError(f"{name} has negative eigenvalue {w.min():.3e}")
    return rho


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigendecomposition of a Hermitian operator with degeneracy grouping.

    Attributes
    ----------
    energies:
        One real eigenvalue per block, strictly ascending.
    projectors:
        Orthogonal projector onto each block, same order as ``energies``.
    vectors:
        Full eigenvector matrix (columns), ascending eigenvalue order, with
        each column's largest-magnitude component rotated to be real positive
        so repeated runs produce identical matrices.
    block_slices:
        Column range of ``vectors`` spanned by each block.
    degeneracy_tol:
        Absolute gap below which eigenvalues were merged into one block.
    """

    energies: np.ndarray
    projectors: list[np.ndarray]
    vectors: np.ndarray
    block_slices: list[slice] = field(repr=False)
    degeneracy_tol: float

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def nondegenerate(self) -> bool:
        return len(self.projectors) == self.dim

    def projector_sum(self) -> np.ndarray:
        return sum(self.projectors, start=np.zeros((self.dim, self.dim), dtype=complex))


def _fix_column_phases(vectors: np.ndarray) -> np.ndarray:
    """Make each column's largest-|entry| real positive (determinism only)."""
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    return vectors / (pivots / np.abs(pivots))


def hermitian_eigensystem(
    h: np.ndarray, degeneracy_rtol: float = DEGENERACY_RTOL
) -> SpectralDecomposition:
    """Diagonalize a Hermitian operator, grouping near-equal eigenvalues.

    Two consecutive eigenvalues belong to the same block when their gap is
    below ``degeneracy_rtol`` times the spectral scale (max of the spectral
    range and the largest magnitude, floored at 1 to keep the tolerance
    meaningful for near-zero operators).
    """
    h = require_hermitian(h)
    w, v = np.linalg.eigh(h)
    v = _fix_column_phases(v)
    scale = max(float(w[-1] - w[0]), float(np.max(np.abs(w))), 1.0)
    tol = degeneracy_rtol * scale

    slices: list[slice] = []
    start = 0
    for i in range(1, len(w)):
        if w[i] - w[i - 1] > tol:
            slices.append(slice(start, i))
            start = i
    slices.append(slice(start, len(w)))

    energies = np.array([w[s].mean() for s in slices])
    projectors = [v[:, s] @ v[:, s].conj().T for s in slices]
    return SpectralDecomposition(
        energies=energies,
        projectors=projectors,
        vectors=v,
        block_slices=slices,
        degeneracy_tol=tol,
    )


def dephase(m: np.ndarray, spec: SpectralDecomposition) -> np.ndarray:
    """Project onto the block-diagonal part: sum_a P_a M P_a.

    Works for states and observables alike; preserves hermiticity and trace.
    """
    m = require_square(m)
    if m.shape[0] != spec.dim:
        raise ValidationError(f"dimension mismatch: matrix {m.shape[0]}, basis {spec.dim}")
    out = np.zeros_like(m)
    for p in spec.projectors:
        out += p @ m @ p
    return out


def offdiagonal_part(m: np.ndarray, spec: SpectralDecomposition) -> np.ndarray:
    """Complement of :func:`dephase`: the block-off-diagonal remainder."""
    return require_square(m) - dephase(m, spec)


def pulled_back(u: np.ndarray, observable: np.ndarray) -> np.ndarray:
    """Heisenberg picture at the end of an evolution: U^dag O U."""
    u = np.asarray(u, dtype=complex)
    return u.conj().T @ np.asarray(observable, dtype=complex) @ u


def evolve_phase(
    h: np.ndarray, u_value: float, spec: SpectralDecomposition | None = None
) -> np.ndarray:
    """Matrix phase factor exp(i * u_value * H) for Hermitian H."""
    if spec is None:
        spec = hermitian_eigensystem(h)
    phases = np.exp(1j * u_value * spec.energies)
    out = np.zeros((spec.dim, spec.dim), dtype=complex)
    for ph, p in zip(phases, spec.projectors):
        out += ph * p
    return out


def nearest_unitary(m: np.ndarray) -> np.ndarray:
    """Polar projection onto the unitary group via SVD (m = W S V^dag -> W V^dag)."""
    m = require_square(m)
    w, _, vh = np.linalg.svd(m)
    return w @ vh


def operator_norm(h: np.ndarray) -> float:
    """Largest singular value; for Hermitian input this is max |eigenvalue|."""
    h = require_square(h)
    return float(np.linalg.norm(h, ord=2))


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values."""
    m = require_square(m)
    return float(np.linalg.norm(m, ord="nuc"))
