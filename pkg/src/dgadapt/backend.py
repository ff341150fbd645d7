"""Kernel backend selection.

The hot mesh-level kernels exist twice: a Cython extension
(``dgadapt._kernels``) and a vectorized NumPy fallback
(``dgadapt._kernels_py``).  The compiled module is preferred when importable;
``DGADAPT_BACKEND=python`` or ``=compiled`` forces a choice (the latter raises
if the extension is missing).
"""

from __future__ import annotations

import os

_requested = os.environ.get("DGADAPT_BACKEND", "auto").lower()
if _requested not in ("auto", "compiled", "python"):
    raise RuntimeError(
        f"DGADAPT_BACKEND must be 'auto', 'compiled' or 'python', "
        f"got {_requested!r}"
    )

kernels = None
if _requested in ("auto", "compiled"):
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise
if kernels is None:
    from . import _kernels_py as kernels  # type: ignore[no-redef]

BACKEND = "compiled" if kernels.is_compiled() else "python"


def available_backends():
    """Names of importable kernel backends."""
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names


def get_kernels(name: str):
    """Fetch a kernel backend module by name (for tests and benchmarks)."""
    if name == "python":
        from . import _kernels_py
        return _kernels_py
    if name == "compiled":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
