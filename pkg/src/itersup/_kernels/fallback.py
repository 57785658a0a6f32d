"""NumPy reference implementations of the hot path kernels.

The compiled extension in ``_fast.pyx`` mirrors these routines operation
for operation so that both backends produce bitwise-identical output; the
equality is asserted in the test suite.  Several kernels consume their
increment buffer in place to keep peak memory at one block.

Grid convention shared by all kernels: a path on n + 1 nodes is described
by its n increments; node 0 carries value 0 and is always included in
extremes.
"""
from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def cumsum_extremes(inc: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rowwise (sup, inf, last) of the prefix-sum path. Consumes ``inc``."""
    if inc.ndim != 2:
        raise ValueError("expected a (rows, n) increment block")
    if inc.shape[1] == 0:
        z = np.zeros(inc.shape[0])
        return z, z.copy(), z.copy()
    cs = np.cumsum(inc, axis=1, out=inc)
    sup = np.maximum(cs.max(axis=1), 0.0)
    inf = np.minimum(cs.min(axis=1), 0.0)
    last = cs[:, -1].copy()
    return sup, inf, last


def windowed_sup(inc: np.ndarray, center: int, n_left: np.ndarray,
                 n_right: np.ndarray) -> np.ndarray:
    """Rowwise sup of a two-sided path over per-row node windows.

    ``inc`` holds increments left to right across a grid anchored at 0
    between columns center-1 and center; row i is scanned n_left[i] nodes
    leftward and n_right[i] rightward.  Consumes ``inc``.
    """
    rows = np.arange(inc.shape[0])
    sup = np.zeros(inc.shape[0])
    if center < inc.shape[1]:
        right = inc[:, center:]
        np.cumsum(right, axis=1, out=right)
        np.maximum.accumulate(right, axis=1, out=right)
        nr = np.asarray(n_right, dtype=np.int64)
        got = right[rows, np.maximum(nr, 1) - 1]
        np.maximum(sup, np.where(nr > 0, got, 0.0), out=sup)
    if center > 0:
        left = inc[:, center - 1::-1]
        np.cumsum(left, axis=1, out=left)
        np.minimum.accumulate(left, axis=1, out=left)
        nl = np.asarray(n_left, dtype=np.int64)
        got = left[rows, np.maximum(nl, 1) - 1]
        np.maximum(sup, np.where(nl > 0, -got, 0.0), out=sup)
    return sup


def interp_max(xvals: np.ndarray, x0: float, dx: float,
               y: np.ndarray) -> np.ndarray:
    """Rowwise max of linearly interpolated X values at query points ``y``.

    Row i of ``xvals`` holds node values on the uniform grid x0 + j*dx and
    is queried at row i of ``y``; queries must already lie inside the grid.
    """
    pos = (y - x0) / dx
    idx = np.floor(pos).astype(np.int64)
    np.clip(idx, 0, xvals.shape[1] - 2, out=idx)
    frac = pos - idx
    lo = np.take_along_axis(xvals, idx, axis=1)
    hi = np.take_along_axis(xvals, idx + 1, axis=1)
    vals = lo + (hi - lo) * frac
    return vals.max(axis=1)


def pickands_scores(inc: np.ndarray, shift: np.ndarray, drift: np.ndarray,
                    idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Shifted-path extremes and level readings for the tilted estimator.

    Builds path = prefix_sums(inc) + shift rowwise, reads it at columns
    ``idx`` (returned as S), then returns M = rowwise max of path - drift,
    floored at the t=0 value 0.  Consumes ``inc``.
    """
    cs = np.cumsum(inc, axis=1, out=inc)
    path = cs
    path += shift[None, :]
    s_vals = path[:, idx]
    path -= drift[None, :]
    m_vals = np.maximum(path.max(axis=1), 0.0)
    return m_vals, s_vals


def bm_sup_passage(inc: np.ndarray, level: float) -> tuple[np.ndarray, np.ndarray]:
    """Rowwise path sup plus the increment count at first passage of level.

    The count is the smallest m with prefix_sum(m) >= level, or 0 when the
    row never reaches it.  Consumes ``inc``.
    """
    cs = np.cumsum(inc, axis=1, out=inc)
    sup = np.maximum(cs.max(axis=1), 0.0)
    hit = cs >= level
    reached = hit.any(axis=1)
    first = np.where(reached, hit.argmax(axis=1) + 1, 0).astype(np.int64)
    return sup, first
