"""Backend selection for the hot kernels.

The compiled extension is used when importable; set ``POSPART_PURE_PYTHON=1``
to force the pure-Python fallback. ``BACKEND`` names the active choice.
"""

import os

from . import _pykernels as python_backend

try:
    from . import _ckernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

if compiled_backend is not None and os.environ.get("POSPART_PURE_PYTHON", "") not in ("1", "true"):
    _impl = compiled_backend
    BACKEND = "cython"
else:
    _impl = python_backend
    BACKEND = "python"

ldl_factor = _impl.ldl_factor
ldl_solve = _impl.ldl_solve
tridiag_matvec = _impl.tridiag_matvec
heat_march = _impl.heat_march

__all__ = ["BACKEND", "ldl_factor", "ldl_solve", "tridiag_matvec", "heat_march",
           "python_backend", "compiled_backend"]
