"""Step-kernel backend selection.

The compiled extension is used when it imports; otherwise the NumPy/pure
Python versions are used. Set ``HADAMARD_RW_PURE_PYTHON=1`` to force the
fallback.
"""

import os

from . import _kernels_py

if os.environ.get("HADAMARD_RW_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

apply_float = _impl.apply_float
apply_exact = _impl.apply_exact

BACKENDS = {"python": _kernels_py}
try:
    from . import _kernels as _compiled  # type: ignore[attr-defined]

    BACKENDS["cython"] = _compiled
except ImportError:
    pass
