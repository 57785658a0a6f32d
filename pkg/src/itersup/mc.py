"""Monte Carlo estimation of P(sup X(Y(s)) > u) and friends.

Two equivalent reductions of the composed supremum are implemented and
deliberately kept apart: RANGE_REDUCTION simulates Y only through its
running extremes and takes the supremum of X over the window they span,
while DIRECT_COMPOSITION evaluates X along the whole Y path by linear
interpolation.  Their agreement under a common random stream is one of
the package's standing cross-checks.

The time grid of the driver Y and the space grid of X are separate
meshes: long-horizon runs need a coarse driver grid over [0, T] next to a
fine X grid over the (much smaller) range Y sweeps out.  ``mesh`` always
refers to the driver grid; ``x_mesh`` defaults to it.

Reproducibility contract: an estimate is a pure function of
(seed, chunk_size, meshes, shared grid settings); work is split into
chunks with one Philox stream each and integer indicator counts are
reduced in chunk order, so thread count never changes the result.
"""
from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from itersup import _kernels as kern
from itersup import paths
from itersup.rng import philox_stream

DEFAULT_RELATIVE_MESH = 2.0 ** -10
_NODE_BUDGET = 2 ** 21
_SUBBLOCK_ROWS = 256


class TailAccuracyWarning(UserWarning):
    """A reported probability rests on fewer than ~20 exceedances."""


class InterpolationSpanWarning(UserWarning):
    """A composition step jumped across more than one X grid cell."""


class Mode(enum.Enum):
    RANGE_REDUCTION = "RANGE_REDUCTION"
    DIRECT_COMPOSITION = "DIRECT_COMPOSITION"


@dataclass(frozen=True)
class RangeSample:
    min_y: float
    max_y: float

    def __post_init__(self):
        if self.min_y > self.max_y:
            raise ValueError("min_y exceeds max_y")

    @property
    def span(self) -> float:
        return self.max_y - self.min_y


@dataclass
class TailEstimate:
    """Estimated exceedance probabilities on a fixed threshold grid."""

    thresholds: np.ndarray
    p_hat: np.ndarray
    std_err: np.ndarray
    n_reps: int
    mesh: float
    method: str = "CRUDE"

    def __post_init__(self):
        self.thresholds = np.asarray(self.thresholds, dtype=float)
        self.p_hat = np.asarray(self.p_hat, dtype=float)
        self.std_err = np.asarray(self.std_err, dtype=float)
        if not (len(self.thresholds) == len(self.p_hat) == len(self.std_err)):
            raise ValueError("threshold, p_hat, std_err lengths differ")

    def to_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("u,p_hat,std_err,n_reps,mesh,method\n")
            for u, p, s in zip(self.thresholds, self.p_hat, self.std_err):
                f.write(f"{float(u)!r},{float(p)!r},{float(s)!r},"
                        f"{self.n_reps},{float(self.mesh)!r},"
                        f"{self.method}\n")

    @classmethod
    def from_csv(cls, path) -> "TailEstimate":
        rows = []
        with open(path) as f:
            header = f.readline().strip().split(",")
            if header[:3] != ["u", "p_hat", "std_err"]:
                raise ValueError(f"unrecognized tail csv header: {header}")
            for line in f:
                if line.strip():
                    rows.append(line.strip().split(","))
        if not rows:
            raise ValueError("tail csv has no data rows")
        u = np.array([float(r[0]) for r in rows])
        p = np.array([float(r[1]) for r in rows])
        s = np.array([float(r[2]) for r in rows])
        return cls(u, p, s, n_reps=int(rows[0][3]), mesh=float(rows[0][4]),
                   method=rows[0][5])


def resolve_mesh(mesh: float | None, big_t: float) -> float:
    if mesh is not None:
        if not mesh > 0:
            raise ValueError(f"mesh must be positive, got {mesh}")
        return mesh
    return DEFAULT_RELATIVE_MESH * big_t


def _y_scale(y_spec, big_t: float) -> float:
    """Crude standard-deviation scale of Y at the horizon, for windows."""
    if isinstance(y_spec, paths.Fbm):
        return big_t ** y_spec.hurst
    if isinstance(y_spec, paths.StationaryIncrements):
        return math.sqrt(float(np.atleast_1d(
            paths._apply(y_spec.variance, np.array([big_t])))[0]))
    if isinstance(y_spec, paths.StationaryGaussian):
        return 1.0
    if isinstance(y_spec, paths.SelfSimilar):
        return big_t ** y_spec.index
    if isinstance(y_spec, (paths.Identity, paths.Zero)):
        return big_t
    raise TypeError(f"unsupported time-change spec {y_spec!r}")


def _y_path_values(y_spec, n_y: int, mesh: float,
                   gen: np.random.Generator) -> np.ndarray:
    """Y values on the n_y + 1 node grid of [0, T], node 0 first."""
    times = np.arange(n_y + 1) * mesh
    if isinstance(y_spec, paths.Identity):
        return times
    if isinstance(y_spec, paths.Zero):
        return np.zeros(n_y + 1)
    if isinstance(y_spec, paths.Fbm):
        inc, _ = paths.fgn_block(y_spec.hurst, n_y, mesh, gen, 1)
        return np.concatenate([[0.0], np.cumsum(inc[0])])
    if isinstance(y_spec, paths.StationaryIncrements):
        return paths.simulate_stationary_increments_gaussian(
            y_spec.variance, times, gen).values
    if isinstance(y_spec, paths.StationaryGaussian):
        return paths.simulate_stationary_gaussian(
            y_spec.correlation, max(n_y, 1) * mesh, mesh, gen).values[:n_y + 1]
    if isinstance(y_spec, paths.SelfSimilar):
        return np.asarray(y_spec.sampler(times, gen), dtype=float)
    raise TypeError(f"unsupported time-change spec {y_spec!r}")


def sample_range(y_spec, big_t: float, mesh: float,
                 gen: np.random.Generator) -> RangeSample:
    """Grid extremes of one Y path over [0, big_t]."""
    if not big_t >= 0:
        raise ValueError(f"horizon must be nonnegative, got {big_t}")
    if isinstance(y_spec, paths.Identity):
        return RangeSample(0.0, big_t)
    if isinstance(y_spec, paths.Zero):
        return RangeSample(0.0, 0.0)
    n_y = int(round(big_t / mesh))
    vals = _y_path_values(y_spec, n_y, mesh, gen)
    return RangeSample(float(vals.min()), float(vals.max()))


def _x_window_values(x_spec, n_left: int, n_right: int, x_mesh: float,
                     gen: np.random.Generator) -> np.ndarray:
    """X values on the two-sided grid -n_left*x_mesh .. n_right*x_mesh."""
    if isinstance(x_spec, paths.Fbm):
        grid = paths.simulate_fbm_two_sided(
            x_spec.hurst, -n_left * x_mesh, n_right * x_mesh, x_mesh, gen)
        return grid.values
    if isinstance(x_spec, paths.StationaryGaussian):
        n = n_left + n_right
        if n == 0:
            return gen.standard_normal(1)
        grid = paths.simulate_stationary_gaussian(
            x_spec.correlation, n * x_mesh, x_mesh, gen)
        return grid.values
    if isinstance(x_spec, paths.StationaryIncrements):
        times = (np.arange(n_left + n_right + 1) - n_left) * x_mesh
        return paths.simulate_stationary_increments_gaussian(
            x_spec.variance, times, gen).values
    raise TypeError(f"unsupported outer-process spec {x_spec!r}")


def _window_counts(min_y: float, max_y: float, x_mesh: float,
                   ) -> tuple[int, int, int, int]:
    """Node counts covering ([cov]) and inside ([in]) the Y range."""
    cov_l = int(math.ceil(-min_y / x_mesh - 1e-12)) if min_y < 0 else 0
    cov_r = int(math.ceil(max_y / x_mesh - 1e-12)) if max_y > 0 else 0
    in_l = min(int(math.floor(-min_y / x_mesh + 1e-12)), cov_l) \
        if min_y < 0 else 0
    in_r = min(int(math.floor(max_y / x_mesh + 1e-12)), cov_r) \
        if max_y > 0 else 0
    return cov_l, cov_r, in_l, in_r


def sup_iterated(x_spec, y_spec, big_t: float, mesh: float,
                 gen: np.random.Generator, mode: Mode = Mode.RANGE_REDUCTION,
                 x_mesh: float | None = None) -> float:
    """One replication of sup over [0, big_t] of X(Y(s)) on the grid.

    Both modes draw Y first and X second, and size the X window from the Y
    extremes the same way, so running them on identical streams couples the
    replication pathwise: the difference isolates pure composition error.
    """
    if not big_t > 0 or not mesh > 0:
        raise ValueError("horizon and mesh must be positive")
    x_mesh = mesh if x_mesh is None else x_mesh
    n_y = int(round(big_t / mesh))
    y_vals = _y_path_values(y_spec, n_y, mesh, gen)
    min_y, max_y = float(y_vals.min()), float(y_vals.max())
    cov_l, cov_r, in_l, in_r = _window_counts(min_y, max_y, x_mesh)
    x_vals = _x_window_values(x_spec, cov_l, cov_r, x_mesh, gen)
    if mode is Mode.RANGE_REDUCTION:
        return float(x_vals[cov_l - in_l:cov_l + in_r + 1].max())
    if mode is Mode.DIRECT_COMPOSITION:
        jumps = float(np.abs(np.diff(y_vals)).max()) if n_y else 0.0
        if jumps > x_mesh:
            warnings.warn(
                f"largest composition step {jumps:.3g} exceeds the X mesh "
                f"{x_mesh:.3g}; interpolated evaluation skips grid cells",
                InterpolationSpanWarning, stacklevel=2)
        return float(kern.interp_max(
            x_vals[None, :], -cov_l * x_mesh, x_mesh, y_vals[None, :])[0])
    raise ValueError(f"unknown mode {mode!r}")


def range_identity_gaps(x_spec, y_spec, big_t: float, meshes, n_reps: int,
                        seed: int = 0) -> np.ndarray:
    """Per-mesh |sup_RANGE - sup_DIRECT| on nested grids, one row per rep.

    ``meshes`` must be a refinement ladder (each entry an integer multiple
    of the finest).  Every replication draws Y and X once on the finest
    grid; coarser levels reuse the same draw by node striding, which is
    law-exact for the supported processes.  Returns shape
    (n_reps, len(meshes)), coarsest level first, so the convergence of the
    two composition modes can be read per replication rather than across
    independent experiments.
    """
    meshes = sorted(float(m) for m in meshes)
    fine = meshes[0]
    strides = []
    for m in reversed(meshes):
        r = m / fine
        if abs(r - round(r)) > 1e-9 or round(r) < 1:
            raise ValueError(f"mesh {m} is not an integer multiple of the "
                             f"finest mesh {fine}")
        strides.append(int(round(r)))
    s_max = strides[0]
    n_fine = int(round(big_t / fine))
    if n_fine % s_max:
        raise ValueError("big_t must hold a whole number of coarsest cells")
    gaps = np.empty((n_reps, len(strides)))
    for rep in range(n_reps):
        gen = philox_stream(seed, rep)
        y_fine = _y_path_values(y_spec, n_fine, fine, gen)
        lo, hi = float(y_fine.min()), float(y_fine.max())
        cov_l, cov_r, _, _ = _window_counts(lo, hi, fine)
        cov_l += s_max
        cov_r += s_max
        x_fine = _x_window_values(x_spec, cov_l, cov_r, fine, gen)
        for col, s in enumerate(strides):
            xm = s * fine
            y = y_fine[::s]
            mn, mx = float(y.min()), float(y.max())
            c_l, c_r, i_l, i_r = _window_counts(mn, mx, xm)
            rng_sup = x_fine[cov_l - i_l * s:cov_l + i_r * s + 1:s].max()
            grid = x_fine[cov_l - c_l * s:cov_l + c_r * s + 1:s]
            direct = kern.interp_max(grid[None, :], -c_l * xm, xm,
                                     y[None, :])[0]
            gaps[rep, col] = abs(float(rng_sup) - float(direct))
    return gaps


def _warn_sparse(thresholds, hits, n_reps):
    sparse = [f"u={u:g} ({int(h)} hits)"
              for u, h in zip(thresholds, hits) if h < 20]
    if sparse:
        warnings.warn(
            "tail estimates rest on fewer than 20 exceedances at "
            + ", ".join(sparse) + f" out of {n_reps} replications",
            TailAccuracyWarning, stacklevel=3)


@dataclass
class _RunPlan:
    """Per-run quantities shared by every chunk worker, resolved once."""

    x_spec: object
    y_spec: object
    big_t: float
    mesh: float
    x_mesh: float
    thresholds: np.ndarray
    seed: int
    chunk_size: int
    n_reps: int
    shared_halfwidth: float | None = None
    y_statinc_factor: np.ndarray | None = None
    y_stationary_eigs: np.ndarray | None = None
    x_fixed_nodes: int | None = None
    x_statinc_factor: np.ndarray | None = None
    x_stationary_eigs: np.ndarray | None = None


def _plan_run(x_spec, y_spec, big_t, mesh, x_mesh, thresholds, seed,
              chunk_size, n_reps, shared_grid, shared_halfwidth) -> _RunPlan:
    plan = _RunPlan(x_spec, y_spec, big_t, mesh, x_mesh, thresholds, seed,
                    chunk_size, n_reps)
    n_y = int(round(big_t / mesh))
    if isinstance(y_spec, paths.StationaryIncrements):
        plan.y_statinc_factor, _ = paths.stationary_increments_factor(
            y_spec.variance, np.arange(n_y + 1) * mesh)
    if isinstance(y_spec, paths.StationaryGaussian):
        row = paths._apply(y_spec.correlation, np.arange(n_y + 1) * mesh)
        plan.y_stationary_eigs = paths.circulant_eigenvalues(row)
    if isinstance(y_spec, paths.Identity):
        plan.x_fixed_nodes = int(round(big_t / x_mesh))
        nodes = np.arange(plan.x_fixed_nodes + 1) * x_mesh
        if isinstance(x_spec, paths.StationaryIncrements):
            plan.x_statinc_factor, _ = paths.stationary_increments_factor(
                x_spec.variance, nodes)
        if isinstance(x_spec, paths.StationaryGaussian):
            row = paths._apply(x_spec.correlation, nodes)
            plan.x_stationary_eigs = paths.circulant_eigenvalues(row)
    elif shared_grid:
        if shared_halfwidth is None:
            shared_halfwidth = 5.0 * _y_scale(y_spec, big_t)
        n_w = max(1, int(math.ceil(shared_halfwidth / x_mesh - 1e-12)))
        plan.shared_halfwidth = n_w * x_mesh
        if isinstance(x_spec, paths.StationaryGaussian):
            row = paths._apply(x_spec.correlation,
                               np.arange(2 * n_w + 1) * x_mesh)
            plan.x_stationary_eigs = paths.circulant_eigenvalues(row)
    return plan


def _y_extremes_block(plan: _RunPlan, rows: int,
                      gen: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    y, mesh = plan.y_spec, plan.mesh
    n_y = int(round(plan.big_t / mesh))
    if isinstance(y, paths.Identity):
        return np.zeros(rows), np.full(rows, n_y * mesh)
    if isinstance(y, paths.Zero):
        return np.zeros(rows), np.zeros(rows)
    if isinstance(y, paths.Fbm):
        inc, _ = paths.fgn_block(y.hurst, n_y, mesh, gen, rows)
        sup, inf, _ = kern.cumsum_extremes(inc)
        return inf, sup
    if isinstance(y, paths.StationaryIncrements):
        z = gen.standard_normal((rows, plan.y_statinc_factor.shape[0]))
        vals = z @ plan.y_statinc_factor.T
        return (np.minimum(vals.min(axis=1), 0.0),
                np.maximum(vals.max(axis=1), 0.0))
    if isinstance(y, paths.StationaryGaussian):
        vals = paths.circulant_block(plan.y_stationary_eigs, n_y + 1, rows, gen)
        return vals.min(axis=1), vals.max(axis=1)
    if isinstance(y, paths.SelfSimilar):
        times = np.arange(n_y + 1) * mesh
        lo = np.empty(rows)
        hi = np.empty(rows)
        for i in range(rows):
            vals = np.asarray(y.sampler(times, gen), dtype=float)
            lo[i], hi[i] = vals.min(), vals.max()
        return lo, hi
    raise TypeError(f"unsupported time-change spec {y!r}")


def _chunk_sups_fixed_window(plan: _RunPlan, rows: int,
                             gen: np.random.Generator) -> np.ndarray:
    """Y = identity fast path: X supremum over the fixed grid of [0, T]."""
    x, x_mesh, n = plan.x_spec, plan.x_mesh, plan.x_fixed_nodes
    if isinstance(x, paths.Fbm):
        inc, _ = paths.fgn_block(x.hurst, n, x_mesh, gen, rows)
        sup, _, _ = kern.cumsum_extremes(inc)
        return sup
    if isinstance(x, paths.StationaryIncrements):
        z = gen.standard_normal((rows, plan.x_statinc_factor.shape[0]))
        vals = z @ plan.x_statinc_factor.T
        return np.maximum(vals.max(axis=1), 0.0)
    if isinstance(x, paths.StationaryGaussian):
        vals = paths.circulant_block(plan.x_stationary_eigs, n + 1, rows, gen)
        return vals.max(axis=1)
    raise TypeError(f"unsupported outer-process spec {x!r}")


def _chunk_sups_shared_grid(plan: _RunPlan, chunk_index: int, rows: int,
                            gen: np.random.Generator) -> np.ndarray:
    """General Y via range reduction on one wide two-sided X grid.

    Rows whose Y range escapes the preallocated window are redone exactly
    on a salted stream, so the window size is pure optimization, never bias.
    """
    x_mesh = plan.x_mesh
    lo, hi = _y_extremes_block(plan, rows, gen)
    n_w = int(round(plan.shared_halfwidth / x_mesh))
    n_l = np.minimum(np.floor(-lo / x_mesh + 1e-12), n_w).astype(np.int64)
    n_r = np.minimum(np.floor(hi / x_mesh + 1e-12), n_w).astype(np.int64)
    np.clip(n_l, 0, None, out=n_l)
    np.clip(n_r, 0, None, out=n_r)
    overflow = np.flatnonzero((-lo > plan.shared_halfwidth)
                              | (hi > plan.shared_halfwidth))
    x = plan.x_spec
    sup = np.empty(rows)
    if isinstance(x, paths.StationaryGaussian):
        # stationarity: only the span matters, sweep [0, span] on the grid
        counts = np.minimum(n_l + n_r, 2 * n_w)
        for start in range(0, rows, _SUBBLOCK_ROWS):
            stop = min(start + _SUBBLOCK_ROWS, rows)
            vals = paths.circulant_block(
                plan.x_stationary_eigs, 2 * n_w + 1, stop - start, gen)
            np.maximum.accumulate(vals, axis=1, out=vals)
            sup[start:stop] = vals[np.arange(stop - start), counts[start:stop]]
    elif isinstance(x, paths.Fbm):
        for start in range(0, rows, _SUBBLOCK_ROWS):
            stop = min(start + _SUBBLOCK_ROWS, rows)
            inc, _ = paths.fgn_block(x.hurst, 2 * n_w, x_mesh, gen,
                                     stop - start)
            sup[start:stop] = kern.windowed_sup(
                inc, n_w, n_l[start:stop], n_r[start:stop])
    else:
        raise TypeError(f"shared-grid estimation not available for {x!r}")
    for i in overflow:
        salted = philox_stream(plan.seed, chunk_index, salt=1 + int(i))
        cov_l, cov_r, in_l, in_r = _window_counts(
            float(lo[i]), float(hi[i]), x_mesh)
        vals = _x_window_values(x, cov_l, cov_r, x_mesh, salted)
        sup[i] = vals[cov_l - in_l:cov_l + in_r + 1].max()
    return sup


def _chunk_sups_generic(plan: _RunPlan, rows: int,
                        gen: np.random.Generator) -> np.ndarray:
    """Row-by-row exact windows; the slow but assumption-free route."""
    sup = np.empty(rows)
    for i in range(rows):
        sup[i] = sup_iterated(plan.x_spec, plan.y_spec, plan.big_t,
                              plan.mesh, gen, Mode.RANGE_REDUCTION,
                              x_mesh=plan.x_mesh)
    return sup


def _run_chunks(plan: _RunPlan, shared_grid: bool, threads: int) -> np.ndarray:
    n_chunks = -(-plan.n_reps // plan.chunk_size)
    counts = np.zeros((n_chunks, len(plan.thresholds)), dtype=np.int64)

    def work(ci: int) -> None:
        rows = min(plan.chunk_size, plan.n_reps - ci * plan.chunk_size)
        gen = philox_stream(plan.seed, ci)
        if plan.x_fixed_nodes is not None:
            sup = _chunk_sups_fixed_window(plan, rows, gen)
        elif shared_grid:
            sup = _chunk_sups_shared_grid(plan, ci, rows, gen)
        else:
            sup = _chunk_sups_generic(plan, rows, gen)
        counts[ci] = (sup[:, None] > plan.thresholds[None, :]).sum(axis=0)

    if threads <= 1:
        for ci in range(n_chunks):
            work(ci)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(n_chunks)))
    return counts.sum(axis=0)


def estimate_tail(x_spec, y_spec, big_t: float, thresholds, n_reps: int,
                  mesh: float | None = None, x_mesh: float | None = None,
                  seed: int = 0, threads: int = 1, chunk_size: int = 1024,
                  shared_grid: bool = False,
                  shared_halfwidth: float | None = None) -> TailEstimate:
    """Crude Monte Carlo exceedance probabilities at the given thresholds.

    All thresholds share one set of replications (common random numbers),
    so estimates are comparable across u.  With ``mesh=None`` the driver
    mesh starts at its relative default and both meshes are refined
    twofold until every probability moves by less than half its standard
    error, within a node budget.  ``shared_grid`` draws X once per
    replication on a fixed window sized by ``shared_halfwidth`` (escapes
    are resimulated exactly); it changes which draws are used, not the
    estimated law.  The reported mesh is the driver mesh.
    """
    thresholds = np.atleast_1d(np.asarray(thresholds, dtype=float))
    if np.any(thresholds <= 0):
        raise ValueError("thresholds must be positive")
    if n_reps <= 0:
        raise ValueError("n_reps must be positive")
    if big_t <= 0:
        raise ValueError("horizon must be positive")

    def run(m: float, xm: float) -> np.ndarray:
        plan = _plan_run(x_spec, y_spec, big_t, m, xm, thresholds, seed,
                         chunk_size, n_reps, shared_grid, shared_halfwidth)
        return _run_chunks(plan, shared_grid, threads)

    if mesh is not None:
        m = resolve_mesh(mesh, big_t)
        xm = m if x_mesh is None else x_mesh
        counts = run(m, xm)
    else:
        m = resolve_mesh(None, big_t)
        xm = m if x_mesh is None else x_mesh
        counts = run(m, xm)
        while True:
            if big_t / (m / 2) > _NODE_BUDGET:
                warnings.warn(
                    f"mesh refinement stopped at {m:g} by the node budget",
                    TailAccuracyWarning, stacklevel=2)
                break
            finer = run(m / 2, xm / 2)
            p_old = counts / n_reps
            p_new = finer / n_reps
            se = np.sqrt(np.maximum(p_new * (1 - p_new), 1e-300) / n_reps)
            m, xm, counts = m / 2, xm / 2, finer
            if np.all(np.abs(p_new - p_old) < 0.5 * se):
                break
    p = counts / n_reps
    se = np.sqrt(p * (1 - p) / n_reps)
    _warn_sparse(thresholds, counts, n_reps)
    return TailEstimate(thresholds, p, se, n_reps, m, "CRUDE")


def estimate_tail_splitting(x_spec, big_t: float, u: float, levels,
                            n_per_level: int = 1000, mesh: float | None = None,
                            seed: int = 0, meta_reps: int = 10,
                            y_spec=None) -> TailEstimate:
    """Fixed-effort multilevel splitting estimate of P(sup X > u) on [0, T].

    Only the deterministic time change is supported: cloning a replication
    mid-path requires conditioning Y as well, which this estimator does not
    do.  Survivor prefixes are kept up to their first passage of the level
    and the rest of the path is redrawn, which is exact for processes built
    causally from the retained coordinates (Brownian increments directly,
    other pinned processes through the lower-triangular Cholesky factor).

    ``levels`` is the full ladder of intermediate levels ending at ``u``;
    the standard error comes from ``meta_reps`` independent repetitions.
    """
    if y_spec is not None and not isinstance(y_spec, paths.Identity):
        raise NotImplementedError(
            "splitting supports the identity time change only; stochastic Y "
            "would need conditioned cloning of the time change")
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    if len(levels) == 0 or abs(levels[-1] - u) > 1e-12 * max(1.0, abs(u)):
        raise ValueError("levels must end exactly at the target threshold")
    if np.any(np.diff(levels) <= 0) or levels[0] <= 0:
        raise ValueError("levels must be positive and strictly increasing")
    if meta_reps < 2:
        raise ValueError("meta_reps must be at least 2 for a standard error")
    m = resolve_mesh(mesh, big_t)
    n = int(round(big_t / m))
    is_bm = isinstance(x_spec, paths.Fbm) and x_spec.hurst == 0.5
    factor = None
    if not is_bm:
        if isinstance(x_spec, paths.Fbm):
            var = (lambda t, _h=x_spec.hurst: np.asarray(t) ** (2 * _h))
        elif isinstance(x_spec, paths.StationaryIncrements):
            var = x_spec.variance
        else:
            raise NotImplementedError(
                f"splitting needs a process pinned at zero, got {x_spec!r}")
        factor, _ = paths.stationary_increments_factor(
            var, np.arange(n + 1) * m)

    estimates = np.empty(meta_reps)
    for rep in range(meta_reps):
        gen = philox_stream(seed, rep)
        log_p = 0.0
        coords = None  # survivor coordinates: scaled increments or whitened z
        cuts = None
        for li, level in enumerate(levels):
            if coords is None:
                work = gen.standard_normal((n_per_level, n))
                if is_bm:
                    work *= math.sqrt(m)
            else:
                pick = gen.integers(0, len(coords), size=n_per_level)
                fresh = gen.standard_normal((n_per_level, n))
                if is_bm:
                    fresh *= math.sqrt(m)
                keep = np.arange(n)[None, :] < cuts[pick][:, None]
                work = np.where(keep, coords[pick], fresh)
            if is_bm:
                sup, first = kern.bm_sup_passage(work.copy(), level)
            else:
                vals = work @ factor.T
                sup = np.maximum(vals.max(axis=1), 0.0)
                hit = vals >= level
                reached = hit.any(axis=1)
                first = np.where(reached, hit.argmax(axis=1) + 1,
                                 0).astype(np.int64)
            alive = first > 0
            n_alive = int(alive.sum())
            if n_alive == 0:
                raise RuntimeError(
                    f"splitting died at level {level:g} (ladder step {li}): "
                    f"0 of {n_per_level} replications passed; largest "
                    f"supremum reached was {float(sup.max()):.4g}")
            log_p += math.log(n_alive / n_per_level)
            coords = work[alive]
            cuts = first[alive]
        estimates[rep] = math.exp(log_p)
    value = float(estimates.mean())
    se = float(estimates.std(ddof=1) / math.sqrt(meta_reps))
    total = meta_reps * len(levels) * n_per_level
    return TailEstimate(np.array([u]), np.array([value]), np.array([se]),
                        total, m, "SPLITTING")
