"""Endpoint-work quasistatistics diagnostics for counterdiabatic shortcut
protocols: propagation, Kirkwood-Dirac/Margenau-Hill witnesses, benchmark
systems, scaling analysis, and a reproducible CLI."""

from .exceptions import QualityError, StaprobeError, ValidationError
from .operators import (
    SpectralDecomposition,
    dephase,
    evolve_phase,
    hermitian_eigensystem,
    nearest_unitary,
    offdiagonal_part,
    pulled_back,
)
from .propagation import DEFAULT_STEPS, LinearTerms, backend_name, propagate_linear, propagate_unitary
from .protocols import (
    ErrorModel,
    ProtocolSpec,
    RampSchedule,
    oscillator_benchmark,
    qubit_benchmark,
    ramp_value,
)
from .quasiprob import (
    EndpointReport,
    KDMatrix,
    characteristic_function,
    endpoint_means,
    kd_tpm_deviation,
    kd_weights,
    mh_negativity,
    tpm_weights,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "StaprobeError",
    "ValidationError",
    "QualityError",
    "SpectralDecomposition",
    "hermitian_eigensystem",
    "dephase",
    "offdiagonal_part",
    "pulled_back",
    "evolve_phase",
    "nearest_unitary",
    "DEFAULT_STEPS",
    "LinearTerms",
    "backend_name",
    "propagate_linear",
    "propagate_unitary",
    "RampSchedule",
    "ErrorModel",
    "ProtocolSpec",
    "ramp_value",
    "oscillator_benchmark",
    "qubit_benchmark",
    "EndpointReport",
    "KDMatrix",
    "endpoint_means",
    "characteristic_function",
    "kd_weights",
    "tpm_weights",
    "mh_negativity",
    "kd_tpm_deviation",
]
