"""Ramp schedules, drive coefficients, error models, and spec serialization."""

from __future__ import annotations

import json

import numpy as np
import pytest

from staprobe.exceptions import ValidationError
from staprobe.protocols import (
    ERROR_KINDS,
    ErrorModel,
    ProtocolSpec,
    RampSchedule,
    load_spec,
    oscillator_benchmark,
    oscillator_hamiltonian_terms,
    oscillator_symplectic_terms,
    qubit_benchmark,
    qubit_coefficients,
    qubit_hamiltonian,
    qubit_terms,
    ramp_value,
    spec_from_json,
    spec_to_json,
)

QUBIT_KINDS = ERROR_KINDS
OSC_KINDS = ("none", "missing_cd", "waveform_distortion")


class TestRampSchedule:
    def test_endpoints_exact(self):
        ramp = RampSchedule(tau=6.0, start=-4.0, end=4.0)
        s0, sdot0 = ramp_value(ramp, 0.0)
        s1, sdot1 = ramp_value(ramp, 6.0)
        assert s0 == 0.0 and sdot0 == 0.0
        assert s1 == 1.0 and sdot1 == 0.0

    def test_midpoint_is_half(self):
        ramp = RampSchedule(tau=2.0, start=0.0, end=1.0)
        s, _ = ramp_value(ramp, 1.0)
        assert s == pytest.approx(0.5, abs=1e-15)

    def test_derivative_matches_finite_difference(self):
        ramp = RampSchedule(tau=np.pi, start=1.0, end=2.0)
        t = np.linspace(0.1, np.pi - 0.1, 37)
        h = 1e-6
        _, s_dot = ramp_value(ramp, t)
        s_plus, _ = ramp_value(ramp, t + h)
        s_minus, _ = ramp_value(ramp, t - h)
        np.testing.assert_allclose(s_dot, (s_plus - s_minus) / (2 * h), atol=1e-8)

    def test_monotone_increasing(self):
        ramp = RampSchedule(tau=1.0, start=0.0, end=1.0)
        t = np.linspace(0.0, 1.0, 257)
        s, s_dot = ramp_value(ramp, t)
        assert np.all(np.diff(s) > 0)
        assert np.all(s_dot[1:-1] > 0)

    def test_scalar_and_array_paths_agree(self):
        ramp = RampSchedule(tau=3.0, start=2.0, end=-1.0)
        t = np.array([0.3, 1.1, 2.9])
        s_arr, sdot_arr = ramp_value(ramp, t)
        for i, ti in enumerate(t):
            s, s_dot = ramp_value(ramp, float(ti))
            assert s == s_arr[i]
            assert s_dot == sdot_arr[i]

    def test_parameter_spans_interval(self):
        ramp = RampSchedule(tau=6.0, start=-4.0, end=4.0)
        assert ramp.parameter(0.0) == (-4.0, 0.0)
        value, slope = ramp.parameter(6.0)
        assert value == 4.0 and slope == 0.0

    def test_time_outside_window_rejected(self):
        ramp = RampSchedule(tau=1.0, start=0.0, end=1.0)
        with pytest.raises(ValidationError, match="time outside"):
            ramp_value(ramp, 1.5)
        with pytest.raises(ValidationError, match="time outside"):
            ramp_value(ramp, np.array([0.5, -0.2]))

    def test_invalid_construction(self):
        with pytest.raises(ValidationError, match="tau"):
            RampSchedule(tau=0.0, start=0.0, end=1.0)
        with pytest.raises(ValidationError, match="ramp kind"):
            RampSchedule(tau=1.0, start=0.0, end=1.0, kind="cubic")


class TestErrorModel:
    def test_unknown_kind_rejected(self):
        with pytest.raises(ValidationError, match="error kind"):
            ErrorModel(kind="detuning")

    def test_negative_epsilon_rejected(self):
        with pytest.raises(ValidationError, match="epsilon"):
            ErrorModel(kind="missing_cd", epsilon=-0.1)

    @pytest.mark.parametrize("kind", QUBIT_KINDS)
    def test_zero_epsilon_reproduces_exact_qubit_drive(self, kind):
        t = np.linspace(0.0, 6.0, 101)
        base = qubit_coefficients(qubit_benchmark(), t)
        erred = qubit_coefficients(qubit_benchmark(error=ErrorModel(kind, 0.0)), t)
        for a, b in zip(base, erred):
            assert np.array_equal(np.asarray(a), np.asarray(b))

    @pytest.mark.parametrize("kind", OSC_KINDS)
    def test_zero_epsilon_reproduces_exact_oscillator_drive(self, kind):
        t = np.linspace(0.0, np.pi, 101)
        base = oscillator_hamiltonian_terms(oscillator_benchmark(), t)
        erred = oscillator_hamiltonian_terms(
            oscillator_benchmark(error=ErrorModel(kind, 0.0)), t
        )
        for a, b in zip(base, erred):
            assert np.array_equal(np.asarray(a), np.asarray(b))

    @pytest.mark.parametrize("kind", ("transverse_spurious", "commuting_phase"))
    def test_spurious_kinds_rejected_for_oscillator(self, kind):
        with pytest.raises(ValidationError, match="not defined for the oscillator"):
            oscillator_benchmark(error=ErrorModel(kind, 0.05))


class TestQubitCoefficients:
    def test_base_drive_components(self):
        spec = qubit_benchmark()
        t = np.linspace(0.0, 6.0, 61)
        cx, cy, cz = qubit_coefficients(spec, t)
        lam, lam_dot = spec.ramp.parameter(t)
        np.testing.assert_array_equal(cx, np.ones_like(t))
        np.testing.assert_array_equal(cz, lam)
        np.testing.assert_allclose(cy, -lam_dot / (1.0 + lam**2), atol=1e-15)

    def test_cd_vanishes_at_endpoints(self):
        cx, cy, cz = qubit_coefficients(qubit_benchmark(), np.array([0.0, 6.0]))
        np.testing.assert_array_equal(cy, [0.0, 0.0])

    def test_include_cd_false_removes_cd(self):
        spec = qubit_benchmark(include_cd=False)
        _, cy, _ = qubit_coefficients(spec, np.linspace(0.0, 6.0, 41))
        np.testing.assert_array_equal(cy, np.zeros(41))

    def test_missing_cd_scales_by_one_minus_epsilon(self):
        t = np.linspace(0.0, 6.0, 81)
        cx0, cy0, cz0 = qubit_coefficients(qubit_benchmark(), t)
        spec = qubit_benchmark(error=ErrorModel("missing_cd", 0.3))
        cx, cy, cz = qubit_coefficients(spec, t)
        np.testing.assert_allclose(cy, 0.7 * cy0, atol=1e-15)
        np.testing.assert_array_equal(cx, cx0)
        np.testing.assert_array_equal(cz, cz0)

    def test_transverse_spurious_adds_ramp_rate_along_y(self):
        eps = 0.05
        spec = qubit_benchmark(error=ErrorModel("transverse_spurious", eps))
        t = np.linspace(0.0, 6.0, 81)
        _, cy, _ = qubit_coefficients(spec, t)
        _, cy0, _ = qubit_coefficients(qubit_benchmark(), t)
        _, s_dot = ramp_value(spec.ramp, t)
        np.testing.assert_allclose(cy - cy0, eps * s_dot * 6.0, atol=1e-15)

    def test_commuting_phase_rescales_the_base_hamiltonian(self):
        # The added term is proportional to H_0(t) itself, so cx and cz pick
        # up the same factor (1 + eps*s_dot*tau) while cy is untouched.
        eps = 0.05
        spec = qubit_benchmark(error=ErrorModel("commuting_phase", eps))
        t = np.linspace(0.0, 6.0, 81)
        cx, cy, cz = qubit_coefficients(spec, t)
        cx0, cy0, cz0 = qubit_coefficients(qubit_benchmark(), t)
        _, s_dot = ramp_value(spec.ramp, t)
        factor = 1.0 + eps * s_dot * 6.0
        np.testing.assert_allclose(cx, factor * cx0, atol=1e-14)
        np.testing.assert_allclose(cz, factor * cz0, atol=1e-13)
        np.testing.assert_array_equal(cy, cy0)

    def test_waveform_distortion_keeps_cd_on_nominal_ramp(self):
        # The controller believes the nominal waveform, so the CD coefficient
        # is identical with and without the distortion; only cz moves.
        eps = 0.08
        spec = qubit_benchmark(error=ErrorModel("waveform_distortion", eps))
        t = np.linspace(0.0, 6.0, 81)
        cx, cy, cz = qubit_coefficients(spec, t)
        cx0, cy0, cz0 = qubit_coefficients(qubit_benchmark(), t)
        np.testing.assert_array_equal(cy, cy0)
        np.testing.assert_array_equal(cx, cx0)
        bump = eps * 8.0 * np.sin(np.pi * t / 6.0) ** 2
        np.testing.assert_allclose(cz - cz0, bump, atol=1e-14)

    def test_waveform_distortion_vanishes_at_endpoints(self):
        spec = qubit_benchmark(error=ErrorModel("waveform_distortion", 0.1))
        for t in (0.0, 6.0):
            got = qubit_hamiltonian(spec, t)
            want = qubit_hamiltonian(qubit_benchmark(), t)
            np.testing.assert_allclose(got, want, atol=1e-14)

    def test_hamiltonian_is_hermitian_with_correct_spectrum(self):
        h0 = qubit_hamiltonian(qubit_benchmark(), 0.0)
        np.testing.assert_array_equal(h0, h0.conj().T)
        np.testing.assert_allclose(
            np.linalg.eigvalsh(h0), [-np.sqrt(17) / 2, np.sqrt(17) / 2], atol=1e-14
        )

    def test_terms_reproduce_hamiltonian(self):
        spec = qubit_benchmark(error=ErrorModel("transverse_spurious", 0.05))
        terms = qubit_terms(spec)
        for t in (0.0, 1.7, 4.2, 6.0):
            np.testing.assert_allclose(
                terms.value(t), qubit_hamiltonian(spec, t), atol=1e-15
            )

    def test_requires_qubit_spec(self):
        with pytest.raises(ValidationError, match="qubit"):
            qubit_coefficients(oscillator_benchmark(), 0.0)


class TestOscillatorTerms:
    def test_frequency_follows_ramp(self):
        spec = oscillator_benchmark()
        t = np.linspace(0.0, np.pi, 33)
        omega, omega_dot, cd = oscillator_hamiltonian_terms(spec, t)
        nominal, nominal_dot = spec.ramp.parameter(t)
        np.testing.assert_array_equal(omega, nominal)
        np.testing.assert_array_equal(omega_dot, nominal_dot)
        np.testing.assert_allclose(cd, -nominal_dot / (4 * nominal), atol=1e-15)

    def test_cd_vanishes_at_endpoints(self):
        _, _, cd = oscillator_hamiltonian_terms(oscillator_benchmark(), np.array([0.0, np.pi]))
        np.testing.assert_array_equal(cd, [0.0, 0.0])

    def test_missing_cd_scale(self):
        t = np.linspace(0.0, np.pi, 33)
        _, _, cd0 = oscillator_hamiltonian_terms(oscillator_benchmark(), t)
        spec = oscillator_benchmark(error=ErrorModel("missing_cd", 1.0))
        omega, _, cd = oscillator_hamiltonian_terms(spec, t)
        np.testing.assert_array_equal(cd, np.zeros_like(t))
        spec = oscillator_benchmark(error=ErrorModel("missing_cd", 0.25))
        _, _, cd = oscillator_hamiltonian_terms(spec, t)
        np.testing.assert_allclose(cd, 0.75 * cd0, atol=1e-16)

    def test_waveform_distortion_moves_frequency_not_cd(self):
        eps = 0.05
        t = np.linspace(0.0, np.pi, 33)
        omega0, _, cd0 = oscillator_hamiltonian_terms(oscillator_benchmark(), t)
        spec = oscillator_benchmark(error=ErrorModel("waveform_distortion", eps))
        omega, _, cd = oscillator_hamiltonian_terms(spec, t)
        np.testing.assert_array_equal(cd, cd0)
        np.testing.assert_allclose(
            omega - omega0, eps * np.sin(t) ** 2, atol=1e-15
        )

    def test_symplectic_generator_layout(self):
        spec = oscillator_benchmark(error=ErrorModel("missing_cd", 0.4))
        terms = oscillator_symplectic_terms(spec)
        t = 1.3
        omega, _, g = oscillator_hamiltonian_terms(spec, t)
        expected = np.array([[2 * g, 1.0], [-(omega**2), -2 * g]])
        np.testing.assert_allclose(terms.value(t), expected, atol=1e-15)

    def test_frequency_must_stay_positive(self):
        # A downward ramp with a large distortion drives omega through zero.
        ramp = RampSchedule(tau=np.pi, start=2.0, end=0.2)
        with pytest.raises(ValidationError, match="positive"):
            ProtocolSpec(
                system="oscillator",
                ramp=ramp,
                error=ErrorModel("waveform_distortion", 0.7),
            )


class TestProtocolSpec:
    def test_unknown_system_rejected(self):
        with pytest.raises(ValidationError, match="system"):
            ProtocolSpec(system="spin_chain", ramp=RampSchedule(tau=1.0, start=0.0, end=1.0))

    def test_qubit_requires_delta(self):
        with pytest.raises(ValidationError, match="delta"):
            ProtocolSpec(system="qubit", ramp=RampSchedule(tau=6.0, start=-4.0, end=4.0))

    def test_benchmark_parameters(self):
        osc = oscillator_benchmark()
        assert (osc.omega_i, osc.omega_f, osc.tau) == (1.0, 2.0, np.pi)
        qb = qubit_benchmark()
        assert (qb.lambda_i, qb.lambda_f, qb.tau, qb.delta) == (-4.0, 4.0, 6.0, 1.0)

    def test_with_error_replaces_only_the_error(self):
        spec = qubit_benchmark().with_error("missing_cd", 0.1)
        assert spec.error == ErrorModel("missing_cd", 0.1)
        assert spec.ramp == qubit_benchmark().ramp
        assert spec.include_cd


class TestSerialization:
    @pytest.mark.parametrize(
        "spec",
        [
            oscillator_benchmark(),
            oscillator_benchmark(include_cd=False),
            oscillator_benchmark(error=ErrorModel("waveform_distortion", 0.05)),
            qubit_benchmark(),
            qubit_benchmark(error=ErrorModel("commuting_phase", 0.02)),
        ],
    )
    def test_round_trip(self, spec):
        assert spec_from_json(spec_to_json(spec)) == spec

    def test_json_form_is_flat_and_complete(self):
        data = spec_to_json(qubit_benchmark())
        assert data["system"] == "qubit"
        assert data["omega_i"] is None and data["lambda_i"] == -4.0
        assert set(data) == {
            "system",
            "omega_i",
            "omega_f",
            "delta",
            "lambda_i",
            "lambda_f",
            "tau",
            "ramp",
            "include_cd",
            "error_kind",
            "epsilon",
        }

    def test_missing_keys_rejected(self):
        with pytest.raises(ValidationError, match="missing key"):
            spec_from_json({"system": "qubit"})
        with pytest.raises(ValidationError, match="ramp endpoints"):
            spec_from_json({"system": "oscillator", "tau": 1.0})

    def test_load_spec_reads_file(self, tmp_path):
        spec = oscillator_benchmark(error=ErrorModel("missing_cd", 0.05))
        path = tmp_path / "protocol.json"
        path.write_text(json.dumps(spec_to_json(spec)), encoding="utf-8")
        assert load_spec(path) == spec
