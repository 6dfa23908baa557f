"""Kernel backend selection.

The compiled extension is preferred; the pure-Python module is the
fallback.  ``WEXPFIT_BACKEND=python`` (or ``cython``) forces a choice,
which the benchmark and the parity tests use.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on the build
    _kernels = None


def available_backends() -> dict:
    out = {"python": _kernels_py}
    if _kernels is not None:
        out["cython"] = _kernels
    return out


def get_backend(name: str | None = None):
    """Return the kernel module for ``name`` (default: env var, then best)."""
    backends = available_backends()
    if name is None:
        name = os.environ.get("WEXPFIT_BACKEND") or None
    if name is None:
        return backends.get("cython", backends["python"])
    if name not in backends:
        raise ValueError(f"backend {name!r} not available; have {sorted(backends)}")
    return backends[name]
