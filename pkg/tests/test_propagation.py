"""Fixed-step RK4 propagation: convergence order, oracle agreement, and
the LinearTerms fast path versus the generic callable path."""

from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg

from staprobe.exceptions import ValidationError
from staprobe.operators import require_unitary
from staprobe.propagation import (
    DEFAULT_STEPS,
    LinearTerms,
    propagate_linear,
    propagate_unitary,
    stage_times,
)
from staprobe.protocols import qubit_benchmark, qubit_terms


def constant_terms(a: np.ndarray) -> LinearTerms:
    matrices = np.asarray(a, dtype=complex)[None, :, :]
    return LinearTerms(
        matrices=matrices,
        coefficients=lambda times: np.ones((len(times), 1)),
    )


class TestStageGrid:
    def test_stage_times_cover_half_steps(self):
        t = stage_times(0.0, 1.0, 4)
        assert len(t) == 9
        assert t[0] == 0.0 and t[-1] == 1.0
        assert np.allclose(np.diff(t), 0.125)

    def test_default_steps_value(self):
        assert DEFAULT_STEPS == 20_000


class TestConstantGenerator:
    def test_matches_expm_linear_terms(self, rng):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        out = propagate_linear(constant_terms(a), 0.0, 0.7, 400)
        exact = scipy.linalg.expm(0.7 * a)
        assert np.max(np.abs(out - exact)) < 1e-9

    def test_matches_expm_callable(self, rng):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        out = propagate_linear(lambda t: a, 0.0, 0.7, 400)
        exact = scipy.linalg.expm(0.7 * a)
        assert np.max(np.abs(out - exact)) < 1e-9

    def test_unitary_for_constant_hamiltonian(self, rng):
        h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = h + h.conj().T
        u = propagate_unitary(
            LinearTerms(
                matrices=h[None, :, :],
                coefficients=lambda times: np.ones((len(times), 1)),
            ),
            0.0,
            0.5,
            400,
        )
        exact = scipy.linalg.expm(-0.5j * h)
        assert np.max(np.abs(u - exact)) < 1e-9

    def test_initial_condition_respected(self, rng):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        u0 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        out = propagate_linear(constant_terms(a), 0.0, 0.3, 200, u0=u0)
        exact = scipy.linalg.expm(0.3 * a) @ u0
        assert np.max(np.abs(out - exact)) < 1e-10


class TestConvergence:
    def test_fourth_order_richardson(self):
        # Doubling the step count should shrink the error by about 2^4.
        spec = qubit_benchmark()
        terms = qubit_terms(spec)
        ref = propagate_unitary(terms, 0.0, spec.tau, 32_000)
        e_coarse = np.linalg.norm(propagate_unitary(terms, 0.0, spec.tau, 2_000) - ref, 2)
        e_fine = np.linalg.norm(propagate_unitary(terms, 0.0, spec.tau, 4_000) - ref, 2)
        assert 14.0 < e_coarse / e_fine < 18.0

    def test_time_ordering_matters_and_is_correct(self, rng):
        # Piecewise-constant noncommuting generator: the exact answer is the
        # right-to-left product of exponentials.
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))

        def gen(t):
            return a if t < 0.5 else b

        out = propagate_linear(gen, 0.0, 1.0, 4_000)
        exact = scipy.linalg.expm(0.5 * b) @ scipy.linalg.expm(0.5 * a)
        wrong = scipy.linalg.expm(0.5 * a) @ scipy.linalg.expm(0.5 * b)
        assert np.max(np.abs(out - exact)) < 1e-3
        assert np.max(np.abs(out - wrong)) > 1e-2


class TestPathAgreement:
    def test_linear_terms_equals_callable(self):
        spec = qubit_benchmark()
        terms = qubit_terms(spec)
        fast = propagate_linear(
            LinearTerms(matrices=-1j * terms.matrices, coefficients=terms.coefficients),
            0.0,
            spec.tau,
            500,
        )
        slow = propagate_linear(lambda t: -1j * terms.value(t), 0.0, spec.tau, 500)
        assert np.max(np.abs(fast - slow)) < 1e-13

    def test_propagate_unitary_output_is_unitary(self):
        spec = qubit_benchmark()
        u = propagate_unitary(qubit_terms(spec), 0.0, spec.tau, 1_000)
        require_unitary(u, atol=1e-12)


class TestLinearTermsValidation:
    def test_rejects_bad_matrix_shape(self):
        with pytest.raises(ValidationError, match="shape"):
            LinearTerms(matrices=np.zeros((2, 3)), coefficients=lambda t: t)

    def test_rejects_nonsquare_stack(self):
        with pytest.raises(ValidationError, match="shape"):
            LinearTerms(matrices=np.zeros((1, 2, 3)), coefficients=lambda t: t)

    def test_rejects_bad_coefficient_table(self):
        terms = LinearTerms(
            matrices=np.zeros((2, 2, 2), dtype=complex),
            coefficients=lambda times: np.ones((len(times), 3)),
        )
        with pytest.raises(ValidationError, match="coefficient table"):
            propagate_linear(terms, 0.0, 1.0, 10)

    def test_rejects_bad_window(self, rng):
        a = rng.normal(size=(2, 2))
        with pytest.raises(ValidationError):
            propagate_linear(constant_terms(a), 1.0, 0.0, 10)
        with pytest.raises(ValidationError):
            propagate_linear(constant_terms(a), 0.0, 1.0, 0)

    def test_rejects_bad_u0_shape(self, rng):
        a = rng.normal(size=(2, 2))
        with pytest.raises(ValidationError, match="u0"):
            propagate_linear(constant_terms(a), 0.0, 1.0, 10, u0=np.eye(3))

    def test_value_assembles_generator(self):
        spec = qubit_benchmark()
        terms = qubit_terms(spec)
        v = terms.value(1.0)
        assert v.shape == (2, 2)
        assert np.max(np.abs(v - v.conj().T)) < 1e-12
