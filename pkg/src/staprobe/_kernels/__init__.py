"""Backend selection for the RK4 propagation kernel.

Prefers the compiled extension; falls back to the NumPy implementation when
the extension is missing or STAPROBE_PURE_PYTHON is set in the environment.
Both expose the same ``rk4_lincomb`` signature and agree to round-off.
"""
from __future__ import annotations

import os

from . import fallback

if os.environ.get("STAPROBE_PURE_PYTHON"):
    _impl = fallback
    COMPILED = False
else:
    try:
        from . import _rk4 as _impl  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        _impl = fallback
        COMPILED = False

rk4_lincomb = _impl.rk4_lincomb


def backend_name() -> str:
    return "compiled" if COMPILED else "python"
