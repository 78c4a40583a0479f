#!/usr/bin/env python3
"""Time the compiled RK4 kernel against the pure-Python fallback.

Both backends expose the same ``rk4_lincomb(matrices, table, h, u0)``
contract, so this script drives them with identical generator tables (the
two benchmark protocols: a 2x2 avoided crossing and a 40-level truncated
oscillator) and reports wall time plus the worst entrywise disagreement.
The two implementations run the same stage arithmetic in the same order,
so agreement should sit at the bit level; anything above 1e-13 fails.

Usage: python benchmarks/bench_kernels.py [--steps N] [--dim D] [--repeat R]
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from staprobe import ErrorModel, oscillator_benchmark, qubit_benchmark
from staprobe._kernels import COMPILED, backend_name, fallback
from staprobe.oscillator import fock_hamiltonian_terms
from staprobe.propagation import _coefficient_table
from staprobe.protocols import qubit_terms


def _case_tables(steps: int, dim: int):
    """Generator matrices and half-step coefficient tables for both cases."""
    qspec = qubit_benchmark(error=ErrorModel(kind="missing_cd", epsilon=0.05))
    qterms = qubit_terms(qspec)
    ospec = oscillator_benchmark(error=ErrorModel(kind="missing_cd", epsilon=0.05))
    oterms = fock_hamiltonian_terms(ospec, dim)
    cases = []
    for label, terms, tau in (
        ("qubit d=2", qterms, qspec.tau),
        (f"oscillator d={dim}", oterms, ospec.tau),
    ):
        table = _coefficient_table(terms, 0.0, tau, steps)
        gens = np.ascontiguousarray(-1j * terms.matrices)
        h = tau / steps
        u0 = np.eye(terms.dim, dtype=np.complex128)
        cases.append((label, gens, table, h, u0))
    return cases


def _time(fn, gens, table, h, u0, repeat: int) -> tuple[float, np.ndarray]:
    best = float("inf")
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn(gens, table, h, u0.copy())
        best = min(best, time.perf_counter() - start)
    return best, out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps", type=int, default=20_000)
    parser.add_argument("--dim", type=int, default=40)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    print(f"selected backend: {backend_name()}")
    if not COMPILED:
        print("compiled kernel unavailable; timing the fallback against itself")
        from staprobe._kernels import fallback as compiled_impl
    else:
        from staprobe._kernels import _rk4 as compiled_impl

    failures = 0
    for label, gens, table, h, u0 in _case_tables(args.steps, args.dim):
        t_compiled, u_compiled = _time(
            compiled_impl.rk4_lincomb, gens, table, h, u0, args.repeat
        )
        t_python, u_python = _time(fallback.rk4_lincomb, gens, table, h, u0, args.repeat)
        gap = float(np.max(np.abs(u_compiled - u_python)))
        speedup = t_python / t_compiled if t_compiled > 0 else float("inf")
        status = "ok" if gap < 1e-13 else "MISMATCH"
        if status != "ok":
            failures += 1
        print(
            f"{label:>16}: compiled {t_compiled * 1e3:8.1f} ms | python "
            f"{t_python * 1e3:8.1f} ms | speedup {speedup:5.1f}x | "
            f"max|diff| {gap:.2e} [{status}]"
        )
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
