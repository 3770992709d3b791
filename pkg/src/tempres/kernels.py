"""Backend selection for the estimation hot loop.

The compiled extension is preferred when it built; TEMPRES_PURE_PYTHON=1
forces the numpy fallback (the two are compared in tests and in
benchmarks/bench_gls.py).
"""

import os

from . import _gls_numpy

if os.environ.get("TEMPRES_PURE_PYTHON") == "1":
    weighted_scan = _gls_numpy.weighted_scan
    BACKEND = "python"
else:
    try:
        from . import _gls_core

        weighted_scan = _gls_core.weighted_scan
        BACKEND = "cython"
    except ImportError:
        weighted_scan = _gls_numpy.weighted_scan
        BACKEND = "python"
