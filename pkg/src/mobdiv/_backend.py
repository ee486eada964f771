"""Kernel selection: compiled if importable, numpy otherwise.

Set ``MOBDIV_BACKEND=python`` to force the fallback.
"""

import os

from . import _kernels_py

try:
    from . import _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

if _kernels_c is not None and os.environ.get("MOBDIV_BACKEND", "").lower() != "python":
    kernel = _kernels_c
    name = "compiled"
else:
    kernel = _kernels_py
    name = "python"

AVAILABLE = {"python": _kernels_py}
if _kernels_c is not None:
    AVAILABLE["compiled"] = _kernels_c
