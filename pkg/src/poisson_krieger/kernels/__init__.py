"""Hot loops, compiled with numba unless ``POISSON_KRIEGER_NUMBA=0``.

Both backends return identical integer results; float kernels may differ in
the last bits of row sums (summation order), never in per-term arrays.
"""

from __future__ import annotations

import os

from . import _numpy

BACKEND = "numpy"
_impl = _numpy

if os.environ.get("POISSON_KRIEGER_NUMBA", "1").strip().lower() not in {"0", "false", "no", "off"}:
    try:
        from . import _numba as _impl  # noqa: F811
        BACKEND = "numba"
    except ImportError:  # numba missing: stay on numpy
        _impl = _numpy

symdiff_ratio_terms = _impl.symdiff_ratio_terms
flux_brackets = _impl.flux_brackets
cocycle_exponents = _impl.cocycle_exponents
log_rn_density = _impl.log_rn_density

__all__ = ["BACKEND", "symdiff_ratio_terms", "flux_brackets", "cocycle_exponents", "log_rn_density"]
