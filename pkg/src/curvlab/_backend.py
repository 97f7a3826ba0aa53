"""Kernel selection: compiled extension when importable, else pure Python.

Set ``CURVLAB_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

BACKEND = "python"
if not os.environ.get("CURVLAB_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
else:
    _impl = _fallback

jacobi_eigh = _impl.jacobi_eigh
poly_metric_jet = _impl.poly_metric_jet

__all__ = ["BACKEND", "jacobi_eigh", "poly_metric_jet", "_fallback"]
