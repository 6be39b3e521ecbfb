"""Backend switch for the hot loops.

Set ``G2QKD_DISABLE_JIT=1`` (or have numba missing) to run the pure-numpy
kernels.  The flag is read once, at import time.
"""
import os

_FALSY = {"", "0", "false", "no", "off"}

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("G2QKD_DISABLE_JIT", "0").strip().lower() in _FALSY


def jit(fn):
    """Compile ``fn`` in nopython mode when numba is available.

    The uncompiled function is kept on ``.py_func`` either way so benchmarks
    can compare against the interpreted loop.
    """
    if not HAVE_NUMBA:
        fn.py_func = fn
        return fn
    return njit(cache=True, nogil=True)(fn)


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
