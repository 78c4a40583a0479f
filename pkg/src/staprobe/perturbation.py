"""First-order commutator expansion for small unitary implementation errors.

An imperfect shortcut U_eps = U_exact * exp(-i eps K) pulls the final
reference Hamiltonian back to H_ad + i eps [K, H_ad] + O(eps^2). The
off-diagonal elements of that correction are linear in eps while the
induced transition probabilities are quadratic; this module provides both
sides of that hierarchy for explicit generators K.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .operators import evolve_phase, require_hermitian

__all__ = [
    "ErrorGenerator",
    "first_order_pullback",
    "exact_pullback",
    "predicted_transition_probabilities",
]


@dataclass(frozen=True)
class ErrorGenerator:
    """Hermitian generator K with dimensionless amplitude epsilon."""

    k_matrix: np.ndarray
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "k_matrix", require_hermitian(self.k_matrix, name="K"))
        if self.epsilon < 0:
            raise ValidationError(f"epsilon must be >= 0, got {self.epsilon}")


def _check_dims(h_ad: np.ndarray, gen: ErrorGenerator) -> np.ndarray:
    h_ad = require_hermitian(h_ad, name="H_ad")
    if h_ad.shape != gen.k_matrix.shape:
        raise ValidationError(
            f"dimension mismatch: H_ad {h_ad.shape}, K {gen.k_matrix.shape}"
        )
    return h_ad


def first_order_pullback(h_ad: np.ndarray, gen: ErrorGenerator) -> np.ndarray:
    """H_ad + i eps [K, H_ad], requiring H_ad diagonal in the working basis.

    Element (m, n) of the correction is i eps (E_n - E_m) K_mn, so only K
    elements connecting different energies contribute.
    """
    h_ad = _check_dims(h_ad, gen)
    off = h_ad - np.diag(np.diag(h_ad))
    if off.size and np.max(np.abs(off)) > 1e-10:
        raise ValidationError("H_ad must be diagonal in the working basis")
    k = gen.k_matrix
    return h_ad + 1j * gen.epsilon * (k @ h_ad - h_ad @ k)


def exact_pullback(h_ad: np.ndarray, gen: ErrorGenerator) -> np.ndarray:
    """exp(i eps K) H_ad exp(-i eps K), valid for any Hermitian H_ad."""
    h_ad = _check_dims(h_ad, gen)
    v = evolve_phase(gen.k_matrix, gen.epsilon)
    return v @ h_ad @ v.conj().T


def predicted_transition_probabilities(gen: ErrorGenerator) -> np.ndarray:
    """Leading-order transition matrix eps^2 |K_mn|^2 with a zero diagonal."""
    p = gen.epsilon**2 * np.abs(gen.k_matrix) ** 2
    np.fill_diagonal(p, 0.0)
    return p
