"""Commutator expansion of pulled-back Hamiltonians for explicit generators."""

from __future__ import annotations

import numpy as np
import pytest

from staprobe.exceptions import ValidationError
from staprobe.operators import evolve_phase
from staprobe.perturbation import (
    ErrorGenerator,
    exact_pullback,
    first_order_pullback,
    predicted_transition_probabilities,
)


def random_hermitian(rng, d):
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return m + m.conj().T


class TestErrorGenerator:
    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError, match="K"):
            ErrorGenerator(np.array([[0.0, 1.0], [0.0, 0.0]]), 0.1)

    def test_rejects_negative_epsilon(self):
        with pytest.raises(ValidationError, match="epsilon"):
            ErrorGenerator(np.eye(2), -0.01)

    def test_dimension_mismatch(self, rng):
        gen = ErrorGenerator(random_hermitian(rng, 3), 0.1)
        with pytest.raises(ValidationError, match="dimension mismatch"):
            first_order_pullback(np.diag([1.0, 2.0]), gen)


class TestFirstOrderPullback:
    def test_requires_diagonal_reference(self, rng):
        gen = ErrorGenerator(random_hermitian(rng, 3), 0.1)
        with pytest.raises(ValidationError, match="diagonal"):
            first_order_pullback(random_hermitian(rng, 3), gen)

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_offdiagonal_elements_scale_with_energy_gaps(self, rng, d):
        # Correction element (m, n) must equal i*eps*(E_n - E_m)*K_mn exactly:
        # the matrix products involved are the same floating-point operations.
        energies = np.sort(rng.normal(size=d))
        h_ad = np.diag(energies).astype(complex)
        k = random_hermitian(rng, d)
        eps = 0.07
        out = first_order_pullback(h_ad, ErrorGenerator(k, eps))
        for m in range(d):
            for n in range(d):
                if m == n:
                    continue
                want = 1j * eps * (energies[n] - energies[m]) * k[m, n]
                assert out[m, n] == pytest.approx(want, abs=1e-15)

    def test_diagonal_untouched(self, rng):
        h_ad = np.diag([0.5, 1.5, 4.0]).astype(complex)
        gen = ErrorGenerator(random_hermitian(rng, 3), 0.2)
        out = first_order_pullback(h_ad, gen)
        np.testing.assert_array_equal(np.diag(out), np.diag(h_ad))

    def test_result_is_hermitian(self, rng):
        h_ad = np.diag(rng.normal(size=4)).astype(complex)
        out = first_order_pullback(h_ad, ErrorGenerator(random_hermitian(rng, 4), 0.3))
        np.testing.assert_allclose(out, out.conj().T, atol=1e-14)

    def test_degenerate_block_is_invisible(self, rng):
        # K elements inside a degenerate block multiply a zero gap, so a
        # generator confined to that block leaves the first order unchanged.
        h_ad = np.diag([1.0, 1.0, 2.0]).astype(complex)
        k = np.zeros((3, 3), dtype=complex)
        k[0, 1] = 0.3 + 0.4j
        k[1, 0] = np.conj(k[0, 1])
        out = first_order_pullback(h_ad, ErrorGenerator(k, 0.5))
        np.testing.assert_array_equal(out, h_ad)

    def test_zero_epsilon_is_identity_map(self, rng):
        h_ad = np.diag(rng.normal(size=4)).astype(complex)
        gen = ErrorGenerator(random_hermitian(rng, 4), 0.0)
        np.testing.assert_array_equal(first_order_pullback(h_ad, gen), h_ad)


class TestExactPullback:
    def test_preserves_spectrum(self, rng):
        h_ad = np.diag(rng.normal(size=5)).astype(complex)
        gen = ErrorGenerator(random_hermitian(rng, 5), 0.8)
        out = exact_pullback(h_ad, gen)
        np.testing.assert_allclose(
            np.linalg.eigvalsh(out), np.sort(np.diag(h_ad).real), atol=1e-12
        )

    def test_matches_direct_conjugation(self, rng):
        h_ad = random_hermitian(rng, 4)
        k = random_hermitian(rng, 4)
        gen = ErrorGenerator(k, 0.37)
        v = evolve_phase(k, 0.37)
        np.testing.assert_allclose(
            exact_pullback(h_ad, gen), v @ h_ad @ v.conj().T, atol=1e-13
        )

    def test_residual_shrinks_quadratically(self, rng):
        # Richardson step: the first-order truncation error is O(eps^2), so
        # halving eps must shrink the residual by a factor close to 4.
        energies = np.array([0.0, 1.0, 2.5, 4.0])
        h_ad = np.diag(energies).astype(complex)
        k = random_hermitian(rng, 4)
        eps = 0.02
        residuals = []
        for scale in (1.0, 0.5):
            gen = ErrorGenerator(k, eps * scale)
            diff = exact_pullback(h_ad, gen) - first_order_pullback(h_ad, gen)
            residuals.append(np.linalg.norm(diff))
        ratio = residuals[0] / residuals[1]
        assert 3.5 <= ratio <= 4.5


class TestPredictedTransitions:
    def test_zero_diagonal_and_symmetry(self, rng):
        gen = ErrorGenerator(random_hermitian(rng, 5), 0.1)
        p = predicted_transition_probabilities(gen)
        np.testing.assert_array_equal(np.diag(p), np.zeros(5))
        np.testing.assert_allclose(p, p.T, atol=1e-16)

    def test_quadratic_scaling_is_exact(self, rng):
        k = random_hermitian(rng, 4)
        p1 = predicted_transition_probabilities(ErrorGenerator(k, 0.01))
        p2 = predicted_transition_probabilities(ErrorGenerator(k, 0.02))
        np.testing.assert_allclose(p2, 4.0 * p1, rtol=1e-12)

    def test_matches_exact_amplitudes_at_small_epsilon(self, rng):
        # |<m| exp(-i eps K) |n>|^2 -> eps^2 |K_mn|^2 as eps -> 0.
        k = random_hermitian(rng, 4)
        eps = 1e-4
        u = evolve_phase(k, -eps)
        exact = np.abs(u) ** 2
        np.fill_diagonal(exact, 0.0)
        predicted = predicted_transition_probabilities(ErrorGenerator(k, eps))
        mask = predicted > 0
        np.testing.assert_allclose(exact[mask] / predicted[mask], 1.0, atol=1e-3)
