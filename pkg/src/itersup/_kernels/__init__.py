"""Hot-loop kernels with a compiled fast path and a NumPy fallback.

Backend selection happens once at import: the Cython extension is used
when it built successfully and ITERSUP_NO_EXT is not set.  Both backends
are bitwise-identical by construction (asserted in tests), so selection
never changes results, only speed.
"""
import os
import warnings


class KernelFallbackWarning(UserWarning):
    """Extension requested but unavailable; NumPy kernels are in use."""


if os.environ.get("ITERSUP_NO_EXT"):
    from itersup._kernels import fallback as _impl
else:
    try:
        from itersup._kernels import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        from itersup._kernels import fallback as _impl

        warnings.warn(
            "compiled kernels unavailable, using NumPy fallback "
            "(set ITERSUP_NO_EXT=1 to silence)", KernelFallbackWarning)

BACKEND: str = _impl.BACKEND
cumsum_extremes = _impl.cumsum_extremes
windowed_sup = _impl.windowed_sup
interp_max = _impl.interp_max
pickands_scores = _impl.pickands_scores
bm_sup_passage = _impl.bm_sup_passage

__all__ = ["BACKEND", "cumsum_extremes", "windowed_sup", "interp_max",
           "pickands_scores", "bm_sup_passage", "KernelFallbackWarning"]
