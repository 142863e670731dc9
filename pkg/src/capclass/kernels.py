"""Kernel backend selection.

The compiled extension is used when importable; set ``CAPCLASS_PURE_PYTHON=1``
to force the pure-Python fallback.
"""
import os

from . import _pykernels

if os.environ.get("CAPCLASS_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
build_tree = _impl.build_tree
project = _impl.project
conditional_counts = _impl.conditional_counts
aggregate_votes = _impl.aggregate_votes
coverage_scan = _impl.coverage_scan

AGG_MODES = {"max": 0, "min": 1, "mean": 2}
