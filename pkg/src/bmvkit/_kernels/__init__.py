"""Hot kernels with a compiled core and a pure numpy fallback.

The Cython extension is preferred when importable; set ``BMV_PURE_PYTHON=1``
to force the fallback. ``BACKEND`` names the active implementation.
"""

import os

if os.environ.get("BMV_PURE_PYTHON"):
    from . import _pykernels as _impl
else:
    try:
        from . import _cykernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernels as _impl

BACKEND = _impl.BACKEND
poly_traces = _impl.poly_traces
poly_coeff_adjoint = _impl.poly_coeff_adjoint
word_traces = _impl.word_traces
word_adjoint = _impl.word_adjoint

__all__ = [
    "BACKEND",
    "poly_traces",
    "poly_coeff_adjoint",
    "word_traces",
    "word_adjoint",
]
