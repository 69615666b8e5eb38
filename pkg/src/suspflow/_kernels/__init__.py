"""Kernel backend selection.

The compiled extension carries the exponential-tree hot paths; the pure
NumPy/Python fallback implements the same contracts and is selected
automatically when the extension is unavailable. Set SUSPFLOW_KERNEL to
"compiled" or "fallback" to force a choice (forcing "compiled" without the
extension is an import error, not a silent downgrade).
"""
import os

_requested = os.environ.get("SUSPFLOW_KERNEL", "")
if _requested not in ("", "compiled", "fallback"):
    raise ImportError(f"SUSPFLOW_KERNEL must be 'compiled' or 'fallback', got {_requested!r}")

if _requested == "fallback":
    from . import _ref as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _ref as _impl

BACKEND = "compiled" if _impl.__name__.endswith("_core") else "fallback"

orbit_counts = _impl.orbit_counts
backward_branches = _impl.backward_branches
backward_count = _impl.backward_count
