"""Exact simulation of the Gaussian ingredients on uniform grids.

Fractional Gaussian noise is sampled by circulant embedding of its
autocovariance (exact in law, FFT cost), with special-cased Hurst values:
h = 1/2 is plain white noise and h = 1 degenerates to a random straight
line.  Stationary processes embed their correlation row the same way;
general stationary-increment processes go through a dense Cholesky factor.
Every sampler draws from a caller-supplied Philox generator so chunked
Monte Carlo stays reproducible; batched variants return a block of
independent rows and consume the generator in a fixed documented order.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

_EIG_NEG_TOL = 1e-8  # relative eigenvalue floor for the circulant embedding
_CHOLESKY_NODE_CAP = 4097


class SimulationFallbackWarning(UserWarning):
    """Circulant embedding rejected; a dense Cholesky factor was used."""


@dataclass(frozen=True)
class Fbm:
    """Fractional Brownian motion with Hurst index in (0, 1]."""

    hurst: float

    def __post_init__(self):
        if not 0 < self.hurst <= 1:
            raise ValueError(f"hurst must lie in (0, 1], got {self.hurst}")


@dataclass(frozen=True)
class StationaryIncrements:
    """Centered Gaussian process with stationary increments, pinned to 0 at
    t = 0, described by its variance function sigma^2."""

    variance: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class StationaryGaussian:
    """Stationary centered Gaussian process with unit variance.

    ``correlation`` is r(t); ``big_c`` and ``alpha`` describe the local
    behaviour r(t) = 1 - C|t|^alpha + o(|t|^alpha), which the asymptotic
    formulas need but simulation does not.
    """

    correlation: Callable[[np.ndarray], np.ndarray]
    big_c: float
    alpha: float

    def __post_init__(self):
        if not self.big_c > 0:
            raise ValueError(f"C must be positive, got {self.big_c}")
        if not 0 < self.alpha <= 2:
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")


@dataclass(frozen=True)
class SelfSimilar:
    """Self-similar process given by a direct sampler on a time grid."""

    index: float
    sampler: Callable[[np.ndarray, np.random.Generator], np.ndarray]

    def __post_init__(self):
        if not self.index > 0:
            raise ValueError(f"scaling index must be positive, got {self.index}")


@dataclass(frozen=True)
class Identity:
    """Deterministic time change Y(s) = s."""


@dataclass(frozen=True)
class Zero:
    """Deterministic degenerate time change Y(s) = 0."""


ProcessSpec = (Fbm | StationaryIncrements | StationaryGaussian | SelfSimilar
               | Identity | Zero)


@dataclass
class PathGrid:
    """A sampled path on a uniform or explicit time grid.

    ``anchor_index`` marks the node the construction pins (time 0 for
    stationary-increment processes); ``method`` records which sampler
    variant produced the values.
    """

    times: np.ndarray
    values: np.ndarray
    anchor_index: int
    method: str = ""

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise ValueError("times and values must be matching 1-d arrays")
        if not 0 <= self.anchor_index < len(self.times):
            raise ValueError(f"anchor_index {self.anchor_index} out of range")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")


def fgn_autocov(h: float, n: int, dt: float) -> np.ndarray:
    """Autocovariance of fractional Gaussian noise at lags 0..n-1."""
    if not 0 < h <= 1:
        raise ValueError(f"hurst must lie in (0, 1], got {h}")
    k = np.arange(n, dtype=float)
    two_h = 2 * h
    return 0.5 * dt ** two_h * (
        (k + 1) ** two_h - 2 * k ** two_h + np.abs(k - 1) ** two_h)


def circulant_eigenvalues(cov_row: np.ndarray) -> np.ndarray:
    """Eigenvalues of the minimal circulant embedding of a Toeplitz row.

    Raises ValueError when the spectrum is negative beyond the relative
    tolerance; tiny negative round-off is clipped to zero.
    """
    n = len(cov_row)
    if n < 2:
        raise ValueError("need at least two nodes to embed")
    ext = np.concatenate([cov_row, cov_row[-2:0:-1]])
    lam = np.fft.fft(ext).real
    worst = lam.min()
    scale = max(lam.max(), 1e-300)
    if worst < -_EIG_NEG_TOL * scale:
        raise ValueError(
            f"circulant embedding is not nonnegative: min eigenvalue "
            f"{worst:.3e} against scale {scale:.3e}")
    np.clip(lam, 0.0, None, out=lam)
    return lam


def circulant_block(lam: np.ndarray, n: int, rows: int,
                    gen: np.random.Generator) -> np.ndarray:
    """Draw ``rows`` independent stationary Gaussian rows of length n.

    Each FFT of a complex white-noise vector yields two independent rows
    (real and imaginary parts), interleaved so row r depends only on
    complex draw r // 2.  Consumes exactly 2 * ceil(rows/2) * len(lam)
    normals from ``gen``.
    """
    m = len(lam)
    pairs = (rows + 1) // 2
    a = gen.standard_normal((pairs, m))
    b = gen.standard_normal((pairs, m))
    spec = np.sqrt(lam / m) * (a + 1j * b)
    y = np.fft.fft(spec, axis=1)[:, :n]
    block = np.empty((2 * pairs, n))
    block[0::2] = y.real
    block[1::2] = y.imag
    return block[:rows]


_fgn_eig_cache: dict[tuple[float, int], np.ndarray] = {}


def _fgn_eigs(h: float, n: int) -> np.ndarray:
    key = (h, n)
    lam = _fgn_eig_cache.get(key)
    if lam is None:
        lam = circulant_eigenvalues(fgn_autocov(h, n, 1.0))
        if len(_fgn_eig_cache) > 64:
            _fgn_eig_cache.clear()
        _fgn_eig_cache[key] = lam
    return lam


def fgn_block(h: float, n: int, dt: float, gen: np.random.Generator,
              rows: int) -> tuple[np.ndarray, str]:
    """Block of ``rows`` independent fGn rows with step ``dt``.

    Returns the block and a method tag: "iid-exact" (h = 1/2),
    "analytic-line" (h = 1), "circulant" otherwise.  The embedding for fGn
    is nonnegative for every h, so the Cholesky escape hatch of the scalar
    front end is never needed here.
    """
    if n < 0 or rows < 0:
        raise ValueError("n and rows must be nonnegative")
    if n == 0 or rows == 0:
        return np.zeros((rows, n)), "empty"
    if h == 0.5:
        return gen.standard_normal((rows, n)) * math.sqrt(dt), "iid-exact"
    if h == 1.0:
        slope = gen.standard_normal((rows, 1))
        return np.broadcast_to(slope * dt, (rows, n)).copy(), "analytic-line"
    if n == 1:
        return gen.standard_normal((rows, 1)) * dt ** h, "circulant"
    block = circulant_block(_fgn_eigs(h, n), n, rows, gen)
    block *= dt ** h
    return block, "circulant"


def simulate_fgn(h: float, n: int, dt: float,
                 gen: np.random.Generator) -> tuple[np.ndarray, str]:
    """One fGn sample of length n; see :func:`fgn_block` for the tags."""
    block, tag = fgn_block(h, n, dt, gen, 1)
    return block[0], tag


def simulate_fbm_two_sided(h: float, a: float, b: float, mesh: float,
                           gen: np.random.Generator) -> PathGrid:
    """Two-sided fBm on the grid of [a, b] with B(0) = 0.

    One stationary increment sequence spans the whole window, so the two
    sides are correlated exactly as the law requires; the path is then the
    prefix sum re-anchored at the node nearest time 0.
    """
    if not (a <= 0 <= b):
        raise ValueError(f"window [{a}, {b}] must contain 0")
    if not mesh > 0:
        raise ValueError(f"mesh must be positive, got {mesh}")
    n_left = int(round(-a / mesh))
    n_right = int(round(b / mesh))
    n = n_left + n_right
    times = (np.arange(n + 1) - n_left) * mesh
    if n == 0:
        return PathGrid(times, np.zeros(1), 0, "degenerate")
    inc, tag = fgn_block(h, n, mesh, gen, 1)
    values = np.concatenate([[0.0], np.cumsum(inc[0])])
    values -= values[n_left]
    return PathGrid(times, values, n_left, tag)


def _apply(f: Callable, x: np.ndarray) -> np.ndarray:
    out = np.asarray(f(x), dtype=float)
    if out.shape != x.shape:
        out = np.array([f(t) for t in x], dtype=float)
    return out


def simulate_stationary_gaussian(r: Callable, horizon: float, mesh: float,
                                 gen: np.random.Generator) -> PathGrid:
    """Stationary unit-variance Gaussian path on [0, horizon].

    The correlation row is circulant-embedded; when its spectrum fails the
    nonnegativity tolerance a dense Cholesky factor takes over (warned),
    and a genuinely non-PSD covariance is a hard error naming the most
    negative eigenvalue.
    """
    if not horizon > 0 or not mesh > 0:
        raise ValueError("horizon and mesh must be positive")
    n = int(math.floor(horizon / mesh + 1e-9)) + 1
    times = np.arange(n) * mesh
    row = _apply(r, times)
    if abs(row[0] - 1.0) > 1e-9:
        raise ValueError(f"correlation at lag 0 must be 1, got {row[0]}")
    try:
        lam = circulant_eigenvalues(row)
    except ValueError:
        return _stationary_cholesky(row, times, gen)
    values = circulant_block(lam, n, 1, gen)[0]
    return PathGrid(times, values, 0, "circulant")


def _jittered_cholesky(cov: np.ndarray, what: str) -> np.ndarray:
    """Cholesky with a short escalating-jitter schedule; non-PSD is fatal."""
    scale = float(cov.diagonal().max())
    for jitter in (0.0, 1e-12 * scale, 1e-11 * scale, 1e-10 * scale):
        try:
            return np.linalg.cholesky(
                cov + jitter * np.eye(len(cov)) if jitter else cov)
        except np.linalg.LinAlgError:
            continue
    worst = float(np.linalg.eigvalsh(cov).min())
    raise RuntimeError(
        f"{what} is not positive semidefinite even with jitter up to "
        f"{1e-10 * scale:.3e}: most negative eigenvalue {worst:.6e}")


def _stationary_cholesky(row: np.ndarray, times: np.ndarray,
                         gen: np.random.Generator) -> PathGrid:
    n = len(row)
    if n > _CHOLESKY_NODE_CAP:
        raise RuntimeError(
            f"covariance needs a dense factorization but {n} nodes exceed "
            f"the cap {_CHOLESKY_NODE_CAP}; coarsen the mesh")
    idx = np.arange(n)
    cov = row[np.abs(idx[:, None] - idx[None, :])]
    chol = _jittered_cholesky(cov, "stationary covariance")
    warnings.warn("circulant embedding rejected; using dense Cholesky",
                  SimulationFallbackWarning, stacklevel=3)
    values = chol @ gen.standard_normal(n)
    return PathGrid(times, values, 0, "cholesky")


def stationary_increments_factor(variance: Callable,
                                 times: np.ndarray) -> tuple[np.ndarray, int]:
    """Cholesky factor of the covariance implied by a variance function.

    ``times`` is a strictly increasing grid containing 0; the factor covers
    the nonzero nodes (the process is pinned to 0 at time 0).  Returns the
    lower-triangular factor and the index of the zero node.  A short
    escalating-jitter schedule is tried before declaring the covariance
    non-PSD, which is a hard error naming the most negative eigenvalue.
    """
    times = np.asarray(times, dtype=float)
    if len(times) > 1 and not np.all(np.diff(times) > 0):
        raise ValueError("times must be strictly increasing")
    anchor_candidates = np.flatnonzero(times == 0.0)
    if len(anchor_candidates) != 1:
        raise ValueError("time grid must contain 0 exactly once")
    anchor = int(anchor_candidates[0])
    t = np.delete(times, anchor)
    if len(t) > _CHOLESKY_NODE_CAP:
        raise RuntimeError(
            f"{len(t)} nodes exceed the dense factorization cap "
            f"{_CHOLESKY_NODE_CAP}")
    if len(t) == 0:
        return np.zeros((0, 0)), anchor
    sig = _apply(variance, np.abs(t))
    gaps = _apply(variance, np.abs(t[:, None] - t[None, :]).ravel())
    cov = 0.5 * (sig[:, None] + sig[None, :] - gaps.reshape(len(t), len(t)))
    return _jittered_cholesky(cov, "increment covariance"), anchor


def simulate_stationary_increments_gaussian(
        variance: Callable, times: np.ndarray,
        gen: np.random.Generator) -> PathGrid:
    """Path of a stationary-increment Gaussian process on explicit times.

    ``times`` must contain 0, where the path is pinned; grids extending to
    negative times give the two-sided law.  The implied covariance
    (sigma^2|s| + sigma^2|t| - sigma^2|t - s|) / 2 is factored densely via
    :func:`stationary_increments_factor`.
    """
    times = np.asarray(times, dtype=float)
    chol, anchor = stationary_increments_factor(variance, times)
    if len(times) == 1:
        return PathGrid(times, np.zeros(1), anchor, "degenerate")
    free = chol @ gen.standard_normal(chol.shape[0])
    values = np.insert(free, anchor, 0.0)
    return PathGrid(times, values, anchor, "cholesky")
