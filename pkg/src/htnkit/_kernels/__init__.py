"""Hot-loop kernels with a compiled implementation and a pure-Python fallback.

The compiled extension is used when it was built and ``HTNKIT_PURE`` is unset
or ``0``. ``BACKEND`` names the implementation in use.
"""
import os

from . import match_py

match_pure = match_py.match

try:
    if os.environ.get("HTNKIT_PURE", "0") not in ("", "0"):
        raise ImportError("pure backend forced")
    from ._match import match as match_compiled
except ImportError:
    match_compiled = None

if match_compiled is not None:
    match = match_compiled
    BACKEND = "cython"
else:
    match = match_pure
    BACKEND = "python"

__all__ = ["match", "match_pure", "match_compiled", "BACKEND"]
