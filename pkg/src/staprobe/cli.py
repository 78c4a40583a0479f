"""Command-line surface producing reproducible figure-data artifacts.

Each subcommand resolves its parameters (flags override config-file values
override defaults), runs the corresponding benchmark pipeline, and writes
CSV/JSON files plus a manifest into the output directory. Rerunning a
command with the same resolved parameters reproduces every artifact byte
for byte: step counts and grids are fixed, sweep results are assembled in
grid order, and all randomness flows from the recorded seed.

CSV files open with a ``# units:`` comment line followed by the column
header; SVG rendering is an optional convenience layered on the emitted
artifacts (it needs matplotlib and adds no new computation).

Exit codes: 0 success, 1 usage / validation error, 2 numerical-quality
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    EPSILON_GRID,
    dephasing_series,
    loglog_fit,
    shot_budget,
    shot_noise_monte_carlo,
    uniform_phase_grid,
)
from .exceptions import QualityError, ValidationError
from .operators import hermitian_eigensystem
from .oscillator import (
    DEFAULT_FOCK_DIM,
    EndpointCoefficients,
    bogoliubov_from_symplectic,
    endpoint_coefficients,
    fock_h_off,
    oscillator_sweep,
    propagate_symplectic,
)
from .propagation import DEFAULT_STEPS
from .protocols import (
    ErrorModel,
    ProtocolSpec,
    oscillator_benchmark,
    qubit_benchmark,
    spec_from_json,
    spec_to_json,
)
from .quasiprob import endpoint_means
from .qubit import (
    bloch_endpoint,
    chi_gap_profile,
    equatorial_probe,
    phase_swept_witnesses,
    propagate,
    qubit_sweep,
    reference_hamiltonians,
)

DEFAULT_SEED = 12345
DEFAULT_OUT = "staprobe-artifacts"


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved parameters of one CLI run.

    The manifest serializes every field except the output directory, so two
    runs with equal manifests write identical artifact bytes regardless of
    where they land on disk.
    """

    command: str
    out: Path
    seed: int
    steps: int
    dim: int
    svg: bool
    error_kind: str
    epsilons: tuple[float, ...]
    theta_points: int
    phase_points: int
    u_points: int
    u_max: float
    gamma_taus: tuple[float, ...]
    r_values: tuple[float, ...]
    repetitions: int
    validation_epsilon: float
    validation_r: float
    protocol: dict | None

    def manifest(self) -> dict:
        data = asdict(self)
        del data["out"]
        data["epsilons"] = list(self.epsilons)
        data["gamma_taus"] = list(self.gamma_taus)
        data["r_values"] = list(self.r_values)
        data["artifact_version"] = __version__
        return data


_DEFAULTS = {
    "seed": DEFAULT_SEED,
    "steps": DEFAULT_STEPS,
    "dim": DEFAULT_FOCK_DIM,
    "svg": False,
    "error_kind": "missing_cd",
    "epsilons": tuple(EPSILON_GRID),
    "theta_points": 721,
    "phase_points": 721,
    "u_points": 101,
    "u_max": 10.0,
    "gamma_taus": (0.0, math.log(2.0), 1.0, 2.0),
    "r_values": (1.0, 3.0),
    "repetitions": 200,
    "validation_epsilon": 0.05,
    "validation_r": 3.0,
    "protocol": None,
}

_CONFIG_KEYS = set(_DEFAULTS) | {"out"}


def _load_config_file(path: Path) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ValidationError("config file must hold a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    return raw


def _as_float_tuple(value, name: str) -> tuple[float, ...]:
    try:
        out = tuple(float(x) for x in value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name} must be a list of numbers")
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config-file values, and command-line flags."""
    merged = dict(_DEFAULTS)
    merged["out"] = DEFAULT_OUT
    if args.config is not None:
        merged.update(_load_config_file(args.config))
    for flag in ("out", "seed", "steps", "dim", "svg"):
        value = getattr(args, flag)
        if value is not None:
            merged[flag] = value

    seed = int(merged["seed"])
    if not 0 <= seed < 2**64:
        raise ValidationError("seed must fit in an unsigned 64-bit integer")
    steps = int(merged["steps"])
    if steps < 1:
        raise ValidationError("steps must be >= 1")
    dim = int(merged["dim"])
    if dim < 4:
        raise ValidationError("dim must be >= 4")
    epsilons = _as_float_tuple(merged["epsilons"], "epsilons")
    if any(e < 0 for e in epsilons):
        raise ValidationError("epsilons must be nonnegative")
    if sorted(epsilons) != list(epsilons):
        raise ValidationError("epsilons must be sorted ascending")
    gamma_taus = _as_float_tuple(merged["gamma_taus"], "gamma_taus")
    if any(g < 0 for g in gamma_taus):
        raise ValidationError("gamma_taus must be nonnegative")
    r_values = _as_float_tuple(merged["r_values"], "r_values")
    if any(r <= 0 for r in r_values):
        raise ValidationError("r_values must be positive")
    repetitions = int(merged["repetitions"])
    if repetitions < 2:
        raise ValidationError("repetitions must be >= 2")
    for name in ("theta_points", "phase_points", "u_points"):
        if int(merged[name]) < 1:
            raise ValidationError(f"{name} must be >= 1")
    protocol = merged["protocol"]
    if protocol is not None and not isinstance(protocol, dict):
        raise ValidationError("protocol must be a JSON object")

    return RunConfig(
        command=args.command,
        out=Path(merged["out"]),
        seed=seed,
        steps=steps,
        dim=dim,
        svg=bool(merged["svg"]),
        error_kind=str(merged["error_kind"]),
        epsilons=epsilons,
        theta_points=int(merged["theta_points"]),
        phase_points=int(merged["phase_points"]),
        u_points=int(merged["u_points"]),
        u_max=float(merged["u_max"]),
        gamma_taus=gamma_taus,
        r_values=r_values,
        repetitions=repetitions,
        validation_epsilon=float(merged["validation_epsilon"]),
        validation_r=float(merged["validation_r"]),
        protocol=protocol,
    )


# ---------------------------------------------------------------------------
# artifact writers


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: Path, units: str, header: list[str], rows: list[list[str]]) -> None:
    lines = [f"# units: {units}", ",".join(header)]
    lines.extend(",".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _fit_json(fit) -> dict:
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "residual_rms": fit.residual_rms,
        "n_points_used": fit.n_points_used,
        "floor_excluded": fit.floor_excluded,
    }


def _band_pairs(band_weights: dict[int, float]) -> list[list[float]]:
    return [[int(dn), float(w)] for dn, w in sorted(band_weights.items())]


def _matrix_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def _prepare_out(config: RunConfig) -> Path:
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    return out


def _sweep_grid(config: RunConfig) -> list[float]:
    """Error amplitudes for the sweep commands, floor row first."""
    eps = list(config.epsilons)
    if not eps or eps[0] != 0.0:
        eps.insert(0, 0.0)
    return eps


def _positive(eps_values, signals, floor_value: float):
    pairs = [(e, s) for e, s in zip(eps_values, signals) if e > 0]
    eps = [e for e, _ in pairs]
    sig = [s for _, s in pairs]
    return loglog_fit(eps, sig, floor=abs(floor_value))


# ---------------------------------------------------------------------------
# subcommands


def cmd_oscillator_sweep(config: RunConfig) -> list[Path]:
    out = _prepare_out(config)
    eps_grid = _sweep_grid(config)
    points = oscillator_sweep(
        eps_grid,
        error_kind=config.error_kind,
        steps=config.steps,
        theta_points=config.theta_points,
    )
    omega_f = oscillator_benchmark().omega_f

    rows = []
    for point in points:
        flag = "floor" if point.epsilon == 0.0 else ""
        q_minus_one = _fmt(point.q_star - 1.0)
        for theta, dw in zip(point.thetas, point.delta_w_over_omega_f):
            rows.append([_fmt(point.epsilon), _fmt(theta), _fmt(dw), q_minus_one, flag])
    csv_path = out / "oscillator_sweep.csv"
    _write_csv(
        csv_path,
        "epsilon [1], theta [rad], delta_w_coh_over_omega_f [1], q_star_minus_one [1], flag [text]",
        ["epsilon", "theta", "delta_w_coh_over_omega_f", "q_star_minus_one", "flag"],
        rows,
    )

    floor = points[0]
    coherent_fit = _positive(
        [p.epsilon for p in points],
        [p.max_abs_delta_w_over_omega_f for p in points],
        floor.max_abs_delta_w_over_omega_f,
    )
    population_fit = _positive(
        [p.epsilon for p in points],
        [p.q_star - 1.0 for p in points],
        floor.q_star - 1.0,
    )
    slopes_path = out / "oscillator_slopes.json"
    _write_json(
        slopes_path,
        {
            "config": config.manifest(),
            "fits": {
                "coherent_max_abs_delta_w_over_omega_f": _fit_json(coherent_fit),
                "population_q_star_minus_one": _fit_json(population_fit),
            },
        },
    )

    per_point = []
    matrices = None
    for point in points:
        coeffs = EndpointCoefficients(q_star=point.q_star, c=point.c, omega_f=omega_f)
        fp = fock_h_off(coeffs, config.dim)
        per_point.append(
            {
                "epsilon": point.epsilon,
                "nu_abs": point.nu_abs,
                "q_star": point.q_star,
                "c_re": float(point.c.real),
                "c_im": float(point.c.imag),
                "theta_argmax": point.theta_argmax,
                "fourier_amplitude_over_omega_f": point.fourier_amplitude_over_omega_f,
                "band_weights": _band_pairs(fp.band_weights),
            }
        )
        matrices = fp
    fingerprint_path = out / "oscillator_fingerprint.json"
    _write_json(
        fingerprint_path,
        {
            "config": config.manifest(),
            "points": per_point,
            "h_h_at_max_epsilon": _matrix_json(matrices.h_h),
            "h_off_at_max_epsilon": _matrix_json(matrices.h_off),
        },
    )

    manifest_path = out / "oscillator_sweep_manifest.json"
    _write_json(manifest_path, config.manifest())
    written = [csv_path, slopes_path, fingerprint_path, manifest_path]
    if config.svg:
        written.append(_plot_oscillator(out, csv_path))
    return written


def cmd_qubit_sweep(config: RunConfig) -> list[Path]:
    out = _prepare_out(config)
    eps_grid = _sweep_grid(config)
    points = qubit_sweep(
        eps_grid,
        error_kind=config.error_kind,
        steps=config.steps,
        phase_points=config.phase_points,
    )

    rows = []
    for point in points:
        flag = "floor" if point.epsilon == 0.0 else ""
        rows.append(
            [
                _fmt(point.epsilon),
                _fmt(point.half_h_perp),
                _fmt(point.p_transition),
                _fmt(point.d_kd_max),
                _fmt(point.n_mh_max),
                flag,
            ]
        )
    csv_path = out / "qubit_sweep.csv"
    _write_csv(
        csv_path,
        "epsilon [1], half_h_perp [Delta], p_transition [1], d_kd_max [1], n_mh_max [1], flag [text]",
        ["epsilon", "half_h_perp", "p_transition", "d_kd_max", "n_mh_max", "flag"],
        rows,
    )

    u_values = np.linspace(0.0, config.u_max, config.u_points)
    gap_rows = []
    for eps in eps_grid:
        spec = qubit_benchmark(error=ErrorModel(kind=config.error_kind, epsilon=eps))
        u = propagate(spec, config.steps)
        profile = chi_gap_profile(u, spec, equatorial_probe(spec, 0.0), u_values)
        flag = "floor" if eps == 0.0 else ""
        for u_val, gap in profile:
            gap_rows.append([_fmt(eps), _fmt(u_val), _fmt(gap), flag])
    gap_path = out / "qubit_chi_gap.csv"
    _write_csv(
        gap_path,
        "epsilon [1], u [1/Delta], chi_gap [1], flag [text]",
        ["epsilon", "u", "chi_gap", "flag"],
        gap_rows,
    )

    floor = points[0]
    eps_values = [p.epsilon for p in points]
    fits = {
        "half_h_perp": _positive(
            eps_values, [p.half_h_perp for p in points], floor.half_h_perp
        ),
        "p_transition": _positive(
            eps_values, [p.p_transition for p in points], floor.p_transition
        ),
        "d_kd_max": _positive(eps_values, [p.d_kd_max for p in points], floor.d_kd_max),
        "n_mh_max": _positive(eps_values, [p.n_mh_max for p in points], floor.n_mh_max),
    }
    slopes_path = out / "qubit_slopes.json"
    _write_json(
        slopes_path,
        {"config": config.manifest(), "fits": {k: _fit_json(v) for k, v in fits.items()}},
    )

    per_point = []
    for point in points:
        w = point.witnesses
        per_point.append(
            {
                "epsilon": point.epsilon,
                "half_h_perp": point.half_h_perp,
                "p_transition": point.p_transition,
                "im_sum_max": point.im_sum_max,
                "d_max": w.d_max,
                "d_argmax": w.d_argmax,
                "n_max": w.n_max,
                "n_argmax": w.n_argmax,
                "im_max": w.im_max,
                "im_argmax": w.im_argmax,
                "q_at_d_argmax": w.q_at_d_argmax.to_json(),
                "q_at_n_argmax": w.q_at_n_argmax.to_json(),
                "q_at_im_argmax": w.q_at_im_argmax.to_json(),
                "tpm": w.tpm.tolist(),
            }
        )
    fingerprint_path = out / "qubit_fingerprint.json"
    _write_json(fingerprint_path, {"config": config.manifest(), "points": per_point})

    manifest_path = out / "qubit_sweep_manifest.json"
    _write_json(manifest_path, config.manifest())
    written = [csv_path, gap_path, slopes_path, fingerprint_path, manifest_path]
    if config.svg:
        written.append(_plot_qubit(out, csv_path))
    return written


def _measured_linear_coefficients(config: RunConfig) -> tuple[float, float, dict]:
    """Fit A (coherent, linear) and B (population, quadratic) on the qubit.

    Both coefficients come from the missing-CD sweep of the standard
    benchmark: signal = A eps and P = B eps^2, so A and B are exp(intercept)
    of the respective log-log fits.
    """
    eps_grid = _sweep_grid(config)
    points = qubit_sweep(
        eps_grid,
        error_kind="missing_cd",
        steps=config.steps,
        phase_points=config.phase_points,
    )
    floor = points[0]
    eps_values = [p.epsilon for p in points]
    coherent_fit = _positive(
        eps_values, [p.half_h_perp for p in points], floor.half_h_perp
    )
    population_fit = _positive(
        eps_values, [p.p_transition for p in points], floor.p_transition
    )
    a_coeff = math.exp(coherent_fit.intercept)
    b_coeff = math.exp(population_fit.intercept)
    detail = {
        "coherent_fit": _fit_json(coherent_fit),
        "population_fit": _fit_json(population_fit),
    }
    return a_coeff, b_coeff, detail


def cmd_robustness(config: RunConfig) -> list[Path]:
    out = _prepare_out(config)
    a_coeff, b_coeff, baseline = _measured_linear_coefficients(config)

    positive_eps = [e for e in _sweep_grid(config) if e > 0]
    series = dephasing_series(a_coeff, b_coeff, positive_eps, config.gamma_taus)
    rows = [
        [
            _fmt(p.epsilon),
            _fmt(p.gamma_tau),
            _fmt(p.coherent_signal),
            _fmt(p.population_signal),
            _fmt(p.ratio),
        ]
        for p in series
    ]
    dephasing_path = out / "dephasing_series.csv"
    _write_csv(
        dephasing_path,
        "epsilon [1], gamma_tau [1], coherent_signal [Delta], population_signal [1], ratio [1/Delta]",
        ["epsilon", "gamma_tau", "coherent_signal", "population_signal", "ratio"],
        rows,
    )

    eps_grid = _sweep_grid(config)
    wave_points = qubit_sweep(
        eps_grid,
        error_kind="waveform_distortion",
        steps=config.steps,
        phase_points=config.phase_points,
    )
    wave_rows = []
    for point in wave_points:
        flag = "floor" if point.epsilon == 0.0 else ""
        wave_rows.append(
            [_fmt(point.epsilon), _fmt(point.half_h_perp), _fmt(point.p_transition), flag]
        )
    waveform_path = out / "waveform_sweep.csv"
    _write_csv(
        waveform_path,
        "epsilon [1], half_h_perp [Delta], p_transition [1], flag [text]",
        ["epsilon", "half_h_perp", "p_transition", "flag"],
        wave_rows,
    )

    wave_floor = wave_points[0]
    wave_eps = [p.epsilon for p in wave_points]
    wave_coherent = _positive(
        wave_eps, [p.half_h_perp for p in wave_points], wave_floor.half_h_perp
    )
    wave_population = _positive(
        wave_eps, [p.p_transition for p in wave_points], wave_floor.p_transition
    )
    summary_path = out / "robustness_summary.json"
    _write_json(
        summary_path,
        {
            "config": config.manifest(),
            "a_coeff": a_coeff,
            "b_coeff": b_coeff,
            "baseline_fits": baseline,
            "waveform_fits": {
                "coherent_half_h_perp": _fit_json(wave_coherent),
                "population_p_transition": _fit_json(wave_population),
            },
        },
    )

    manifest_path = out / "robustness_manifest.json"
    _write_json(manifest_path, config.manifest())
    written = [dephasing_path, waveform_path, summary_path, manifest_path]
    if config.svg:
        written.append(_plot_robustness(out, dephasing_path))
    return written


def cmd_shots(config: RunConfig) -> list[Path]:
    out = _prepare_out(config)
    a_coeff, _, baseline = _measured_linear_coefficients(config)

    spec = qubit_benchmark()
    h0i, h0f = reference_hamiltonians(spec)
    energies = hermitian_eigensystem(h0f).energies
    span = float(energies[-1] - energies[0])
    tau = spec.tau

    table = []
    for eps in (e for e in _sweep_grid(config) if e > 0):
        for r in config.r_values:
            for gt in config.gamma_taus:
                budget = shot_budget(
                    r, span, a_coeff, eps, gamma_phi=gt / tau if tau else 0.0, tau=tau
                )
                table.append(
                    {
                        "epsilon": eps,
                        "r": r,
                        "gamma_tau": gt,
                        "n_br": budget.n_br,
                    }
                )

    eps_val = config.validation_epsilon
    spec_val = qubit_benchmark(error=ErrorModel(kind="missing_cd", epsilon=eps_val))
    u_val = propagate(spec_val, config.steps)
    bloch = bloch_endpoint(u_val, spec_val)
    phi_star = math.atan2(bloch.h_perp[1], bloch.h_perp[0])
    rho = equatorial_probe(spec_val, phi_star)
    h0i_val, h0f_val = reference_hamiltonians(spec_val)
    exact = endpoint_means(u_val, h0i_val, h0f_val, rho).delta_w_coh
    budget_val = shot_budget(config.validation_r, span, a_coeff, eps_val)
    report = shot_noise_monte_carlo(
        spec_val,
        phi_star,
        budget_val.n_br,
        config.seed,
        repetitions=config.repetitions,
        steps=config.steps,
    )
    detections = np.abs(report.estimates) > 3.0 * report.standard_errors
    ensemble_se = math.sqrt(report.empirical_variance / report.repetitions)
    validation = {
        "epsilon": eps_val,
        "r": config.validation_r,
        "probe_phase": phi_star,
        "n_br": report.n_br,
        "repetitions": report.repetitions,
        "seed": report.seed,
        "exact_delta_w_coh": exact,
        "estimate": report.estimate,
        "ensemble_standard_error": ensemble_se,
        "empirical_variance": report.empirical_variance,
        "bound_variance": report.bound_variance,
        "detection_fraction": float(np.mean(detections)),
        "ensemble_snr": abs(report.estimate) / math.sqrt(report.empirical_variance),
    }

    shots_path = out / "shots.json"
    _write_json(
        shots_path,
        {
            "config": config.manifest(),
            "a_coeff": a_coeff,
            "omega_f_bound": span,
            "tau": tau,
            "baseline_fits": baseline,
            "budget_table": table,
            "validation": validation,
        },
    )
    manifest_path = out / "shots_manifest.json"
    _write_json(manifest_path, config.manifest())
    written = [shots_path, manifest_path]
    if config.svg:
        written.append(_plot_shots(out, shots_path))
    return written


def _fingerprint_protocol(config: RunConfig) -> ProtocolSpec:
    if config.protocol is not None:
        return spec_from_json(config.protocol)
    return oscillator_benchmark(error=ErrorModel(kind="missing_cd", epsilon=0.05))


def cmd_fingerprint(config: RunConfig) -> list[Path]:
    out = _prepare_out(config)
    spec = _fingerprint_protocol(config)

    if spec.system == "oscillator":
        s = propagate_symplectic(spec, config.steps)
        pair = bogoliubov_from_symplectic(s, spec.omega_i, spec.omega_f)
        coeffs = endpoint_coefficients(pair, spec.omega_f)
        fp = fock_h_off(coeffs, config.dim)
        payload = {
            "config": config.manifest(),
            "protocol": spec_to_json(spec),
            "system": "oscillator",
            "nu_abs": abs(pair.nu),
            "q_star": coeffs.q_star,
            "c_re": float(coeffs.c.real),
            "c_im": float(coeffs.c.imag),
            "band_weights": _band_pairs(fp.band_weights),
            "h_h": _matrix_json(fp.h_h),
            "h_off": _matrix_json(fp.h_off),
        }
    else:
        u = propagate(spec, config.steps)
        bloch = bloch_endpoint(u, spec)
        witnesses = phase_swept_witnesses(
            u, spec, uniform_phase_grid(config.phase_points)
        )
        payload = {
            "config": config.manifest(),
            "protocol": spec_to_json(spec),
            "system": "qubit",
            "identity_part": bloch.identity_part,
            "h_parallel": bloch.h_parallel,
            "h_perp": [float(bloch.h_perp[0]), float(bloch.h_perp[1])],
            "half_h_perp": bloch.half_h_perp,
            "d_max": witnesses.d_max,
            "d_argmax": witnesses.d_argmax,
            "n_max": witnesses.n_max,
            "n_argmax": witnesses.n_argmax,
            "im_max": witnesses.im_max,
            "im_argmax": witnesses.im_argmax,
            "q_at_d_argmax": witnesses.q_at_d_argmax.to_json(),
            "q_at_n_argmax": witnesses.q_at_n_argmax.to_json(),
            "q_at_im_argmax": witnesses.q_at_im_argmax.to_json(),
            "tpm": witnesses.tpm.tolist(),
        }

    fingerprint_path = out / "fingerprint.json"
    _write_json(fingerprint_path, payload)
    manifest_path = out / "fingerprint_manifest.json"
    _write_json(manifest_path, config.manifest())
    written = [fingerprint_path, manifest_path]
    if config.svg:
        written.append(_plot_fingerprint(out, fingerprint_path))
    return written


# ---------------------------------------------------------------------------
# optional SVG rendering (reads back the emitted artifacts)


def _pyplot():
    try:
        import matplotlib
    except ImportError:
        raise ValidationError("SVG output needs matplotlib (install the 'plots' extra)")
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def _plot_oscillator(out: Path, csv_path: Path) -> Path:
    plt = _pyplot()
    header, rows = _read_csv(csv_path)
    eps_col = header.index("epsilon")
    theta_col = header.index("theta")
    dw_col = header.index("delta_w_coh_over_omega_f")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    by_eps: dict[float, list[tuple[float, float]]] = {}
    for row in rows:
        by_eps.setdefault(float(row[eps_col]), []).append(
            (float(row[theta_col]), float(row[dw_col]))
        )
    for eps, pairs in sorted(by_eps.items()):
        pairs.sort()
        ax.plot([p[0] for p in pairs], [p[1] for p in pairs], label=f"eps={eps:g}")
    ax.set_xlabel("theta [rad]")
    ax.set_ylabel("delta W_coh / omega_f")
    ax.legend(fontsize=7, ncol=2)
    path = _save(fig, out / "oscillator_sweep.svg")
    plt.close(fig)
    return path


def _plot_qubit(out: Path, csv_path: Path) -> Path:
    plt = _pyplot()
    header, rows = _read_csv(csv_path)
    eps = [float(r[header.index("epsilon")]) for r in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for column in ("half_h_perp", "p_transition", "d_kd_max", "n_mh_max"):
        col = header.index(column)
        pairs = [(e, float(r[col])) for e, r in zip(eps, rows) if e > 0]
        ax.loglog([p[0] for p in pairs], [p[1] for p in pairs], "o-", label=column)
    ax.set_xlabel("epsilon")
    ax.set_ylabel("signal")
    ax.legend(fontsize=8)
    path = _save(fig, out / "qubit_sweep.svg")
    plt.close(fig)
    return path


def _plot_robustness(out: Path, csv_path: Path) -> Path:
    plt = _pyplot()
    header, rows = _read_csv(csv_path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    by_gamma: dict[float, list[tuple[float, float]]] = {}
    for row in rows:
        by_gamma.setdefault(float(row[header.index("gamma_tau")]), []).append(
            (float(row[header.index("epsilon")]), float(row[header.index("ratio")]))
        )
    for gt, pairs in sorted(by_gamma.items()):
        pairs.sort()
        ax.loglog([p[0] for p in pairs], [p[1] for p in pairs], "o-", label=f"Gamma tau={gt:g}")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("coherent / population ratio")
    ax.legend(fontsize=8)
    path = _save(fig, out / "robustness.svg")
    plt.close(fig)
    return path


def _plot_shots(out: Path, json_path: Path) -> Path:
    plt = _pyplot()
    payload = json.loads(json_path.read_text())
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    by_key: dict[tuple[float, float], list[tuple[float, int]]] = {}
    for entry in payload["budget_table"]:
        by_key.setdefault((entry["r"], entry["gamma_tau"]), []).append(
            (entry["epsilon"], entry["n_br"])
        )
    for (r, gt), pairs in sorted(by_key.items()):
        pairs.sort()
        ax.loglog(
            [p[0] for p in pairs],
            [p[1] for p in pairs],
            "o-",
            label=f"R={r:g}, Gamma tau={gt:g}",
        )
    ax.set_xlabel("epsilon")
    ax.set_ylabel("branch shots n_br")
    ax.legend(fontsize=7)
    path = _save(fig, out / "shots.svg")
    plt.close(fig)
    return path


def _plot_fingerprint(out: Path, json_path: Path) -> Path:
    plt = _pyplot()
    payload = json.loads(json_path.read_text())
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if payload["system"] == "oscillator":
        bands = payload["band_weights"]
        ax.bar([b[0] for b in bands], [b[1] for b in bands])
        ax.set_xlabel("band offset dn")
        ax.set_ylabel("B_dn")
    else:
        labels = ["d_max", "n_max", "im_max"]
        ax.bar(labels, [payload[k] for k in labels])
        ax.set_ylabel("witness maximum")
    path = _save(fig, out / "fingerprint.svg")
    plt.close(fig)
    return path


# ---------------------------------------------------------------------------
# entry point


_HANDLERS = {
    "oscillator-sweep": cmd_oscillator_sweep,
    "qubit-sweep": cmd_qubit_sweep,
    "robustness": cmd_robustness,
    "shots": cmd_shots,
    "fingerprint": cmd_fingerprint,
}


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="staprobe",
        description="Endpoint-work quasistatistics benchmarks for shortcut drives.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    help_lines = {
        "oscillator-sweep": "frequency-ramp benchmark: theta/epsilon sweep, slopes, fingerprints",
        "qubit-sweep": "avoided-crossing benchmark: witness sweep, chi gaps, slopes",
        "robustness": "dephasing-ratio series and waveform-distortion slope fits",
        "shots": "shot-budget table plus a seeded Monte Carlo validation run",
        "fingerprint": "pulled-back Hamiltonian fingerprint for one protocol",
    }
    for name, handler in _HANDLERS.items():
        sub = subparsers.add_parser(name, help=help_lines[name])
        sub.add_argument("--config", type=Path, default=None, help="JSON config file")
        sub.add_argument("--out", type=Path, default=None, help="output directory")
        sub.add_argument("--seed", type=int, default=None, help="RNG seed (u64)")
        sub.add_argument("--steps", type=int, default=None, help="integrator steps")
        sub.add_argument("--dim", type=int, default=None, help="Fock truncation")
        sub.add_argument(
            "--svg", action="store_true", default=None, help="also render SVG plots"
        )
        sub.set_defaults(handler=handler)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
        written = args.handler(config)
    except ValidationError as exc:
        print(f"staprobe: error: {exc}", file=sys.stderr)
        return 1
    except QualityError as exc:
        print(f"staprobe: numerical-quality failure: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
