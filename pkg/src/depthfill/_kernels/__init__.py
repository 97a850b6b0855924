"""Filter kernel backends: compiled extension with a pure-numpy fallback.

The active backend is chosen at import time: the Cython extension when it
built successfully, numpy otherwise. Set DEPTHFILL_BACKEND=numpy|cython to
force one (``cython`` raises if the extension is unavailable).
"""

from __future__ import annotations

import os

from . import _numpy

try:
    from . import _jbf_cy
except ImportError:  # extension not built on this interpreter
    _jbf_cy = None

_BACKENDS = {"numpy": _numpy}
if _jbf_cy is not None:
    _BACKENDS["cython"] = _jbf_cy


def get_backend(name: str | None = None):
    """Resolve a backend module by name; None or 'auto' picks the default."""
    if name in (None, "auto"):
        name = os.environ.get("DEPTHFILL_BACKEND", "auto").lower()
    if name == "auto":
        name = "cython" if "cython" in _BACKENDS else "numpy"
    if name not in _BACKENDS:
        raise RuntimeError(
            f"kernel backend {name!r} is not available (built: {sorted(_BACKENDS)})"
        )
    return _BACKENDS[name]


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def active_backend_name() -> str:
    return get_backend().NAME


offset_table = _numpy.offset_table
