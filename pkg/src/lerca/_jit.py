"""Optional numba acceleration.

Every hot kernel in the package is written as plain numpy code that numba
can compile in nopython mode.  When numba is installed and the environment
variable ``LERCA_NUMBA`` is unset (or set to anything other than ``0``,
``false`` or ``off``), kernels are jit-compiled with ``cache=True``.
Otherwise the same functions run as ordinary Python.  Both modes draw from
the same ``numpy.random.Generator`` stream, so results are bit-identical.
"""
import os

_flag = os.environ.get("LERCA_NUMBA", "1").strip().lower()
NUMBA_ENABLED = _flag not in ("0", "false", "off")

if NUMBA_ENABLED:
    try:
        from numba import njit as _numba_njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        return _numba_njit(*args, **kwargs)
else:
    def njit(*args, **kwargs):
        # signature-compatible no-op decorator
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrapper(func):
            return func

        return wrapper
