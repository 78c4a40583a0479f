"""Shared fixtures: the benchmark sweeps and propagators are expensive
enough to compute once per session and reuse across modules."""

from __future__ import annotations

import numpy as np
import pytest

from staprobe import ErrorModel, oscillator_benchmark, qubit_benchmark
from staprobe.analysis import EPSILON_GRID
from staprobe.oscillator import fock_propagation_oracle, oscillator_sweep, phase_probe_state
from staprobe.qubit import propagate, qubit_sweep

EPS_WITH_FLOOR = [0.0] + list(EPSILON_GRID)
ORACLE_STEPS = 4_000  # ample for RK4 at these step sizes (error ~ h^4 ~ 1e-13)


@pytest.fixture(scope="session")
def qubit_missing_cd_sweep():
    return qubit_sweep(EPS_WITH_FLOOR)


@pytest.fixture(scope="session")
def qubit_waveform_sweep():
    return qubit_sweep(EPS_WITH_FLOOR, error_kind="waveform_distortion")


@pytest.fixture(scope="session")
def oscillator_missing_cd_sweep():
    return oscillator_sweep(EPS_WITH_FLOOR)


@pytest.fixture(scope="session")
def exact_qubit():
    spec = qubit_benchmark()
    return spec, propagate(spec)


@pytest.fixture(scope="session")
def eps05_qubit():
    spec = qubit_benchmark(error=ErrorModel(kind="missing_cd", epsilon=0.05))
    return spec, propagate(spec)


@pytest.fixture(scope="session")
def fock_oracle_reports():
    """Brute-force endpoint reports (with the dim+10 sensitivity re-run)
    for the amplitudes the oracle-equivalence check cares about."""
    theta = 0.7
    reports = {}
    for eps in (0.0, 0.05, 0.1):
        spec = oscillator_benchmark(error=ErrorModel(kind="missing_cd", epsilon=eps))
        reports[eps] = {
            40: fock_propagation_oracle(
                spec, phase_probe_state(theta, 40), dim=40, steps=ORACLE_STEPS
            ),
            50: fock_propagation_oracle(
                spec,
                phase_probe_state(theta, 50),
                dim=50,
                steps=ORACLE_STEPS,
                check_truncation=False,
            ),
        }
    return theta, reports


@pytest.fixture
def rng():
    return np.random.default_rng(20260817)
