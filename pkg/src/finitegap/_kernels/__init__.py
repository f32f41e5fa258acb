"""Kernel selection: compiled Cython extension when available, NumPy fallback
otherwise.  FINITEGAP_PURE=1 forces the fallback (used by the benchmark and
the equivalence tests)."""

import os

if os.environ.get("FINITEGAP_PURE") == "1":
    from . import theta_fallback as impl
else:
    try:
        from . import _theta_cy as impl  # type: ignore[attr-defined]
    except ImportError:
        from . import theta_fallback as impl

theta_sums = impl.theta_sums
theta_sums_batch = impl.theta_sums_batch
USING_COMPILED = bool(getattr(impl, "COMPILED", False))

__all__ = ["theta_sums", "theta_sums_batch", "USING_COMPILED"]
