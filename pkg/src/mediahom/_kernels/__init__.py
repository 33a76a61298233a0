"""Hot-loop kernels with a compiled core and a pure-numpy fallback.

The compiled extension is preferred when it imported cleanly; setting the
environment variable ``MEDIAHOM_PURE_PYTHON`` (to any non-empty value)
forces the fallback.  Both backends expose the same five functions with
identical semantics, so everything above this package is backend-agnostic.
"""

import os

from . import _pure

if os.environ.get("MEDIAHOM_PURE_PYTHON"):
    _backend = _pure
else:
    try:
        from . import _compiled as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = _pure

apply_kraus = _backend.apply_kraus
trajectory = _backend.trajectory
iterate_until = _backend.iterate_until
iterate_to_target = _backend.iterate_to_target
hermitian_trace_norm = _backend.hermitian_trace_norm


def backend_name():
    """Name of the active backend: ``"compiled"`` or ``"pure"``."""
    return _backend.BACKEND


__all__ = [
    "apply_kraus",
    "trajectory",
    "iterate_until",
    "iterate_to_target",
    "hermitian_trace_norm",
    "backend_name",
]
