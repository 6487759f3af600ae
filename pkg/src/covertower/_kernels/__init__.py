"""Hot loops: explicit walk scans and run-table pair scans.

The compiled module is used when it was built and ``COVERTOWER_PURE_PYTHON``
is not set to ``1``; otherwise the pure-Python twins are used. ``BACKEND``
names the active implementation.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("COVERTOWER_PURE_PYTHON") != "1":
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        _impl = _ckernels

fanout_conflicts = _impl.fanout_conflicts
find_occurrences = _impl.find_occurrences
first_invalid_step = _impl.first_invalid_step
pair_scan = _impl.pair_scan

__all__ = ["BACKEND", "fanout_conflicts", "find_occurrences", "first_invalid_step", "pair_scan"]
