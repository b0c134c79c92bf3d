"""Selection between the compiled kernels and the pure numpy fallback.

The compiled extension is preferred when importable. Set the
environment variable ``CVSHARE_BACKEND`` to ``python`` to force the
fallback or to ``compiled`` to fail loudly when the extension is
missing.
"""

from __future__ import annotations

import os

_ENV_VAR = "CVSHARE_BACKEND"
_requested = os.environ.get(_ENV_VAR, "").strip().lower()
if _requested not in ("", "compiled", "python"):
    raise RuntimeError(f"{_ENV_VAR} must be 'compiled' or 'python', got {_requested!r}")

if _requested == "python":
    from . import _kernels_py as _kernels_module
else:
    try:
        from . import _kernels as _kernels_module  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _kernels_py as _kernels_module


def kernels():
    """The active kernel module (compiled or pure numpy)."""
    return _kernels_module


def backend_name() -> str:
    """Either ``"compiled"`` or ``"python"``."""
    return _kernels_module.BACKEND
