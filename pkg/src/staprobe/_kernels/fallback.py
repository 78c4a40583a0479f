"""NumPy reference implementation of the RK4 kernel.

Same stage arithmetic as the compiled version, used when the extension is
unavailable (or forced via STAPROBE_PURE_PYTHON=1). Roughly two orders of
magnitude slower for small dimensions where per-step Python overhead wins.
"""
from __future__ import annotations

import numpy as np


def rk4_lincomb(
    gens: np.ndarray, coeffs: np.ndarray, h: float, u0: np.ndarray
) -> np.ndarray:
    k_terms = gens.shape[0]
    flat = gens.reshape(k_terms, -1)
    d = gens.shape[1]
    steps = (coeffs.shape[0] - 1) // 2
    half = 0.5 * h
    sixth = h / 6.0

    u = np.array(u0, dtype=np.complex128, order="C")
    for step in range(steps):
        a1 = (coeffs[2 * step] @ flat).reshape(d, d)
        a2 = (coeffs[2 * step + 1] @ flat).reshape(d, d)
        a3 = (coeffs[2 * step + 2] @ flat).reshape(d, d)
        k1 = a1 @ u
        k2 = a2 @ (u + half * k1)
        k3 = a2 @ (u + half * k2)
        k4 = a3 @ (u + h * k3)
        u += sixth * (k1 + 2.0 * (k2 + k3) + k4)
    return u
