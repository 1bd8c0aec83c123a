"""Monte Carlo ensembles of final-time coefficients and their moments.

`run_ensemble` simulates many independently seeded driving paths,
solves the forward problem along each, and reduces the final-time
coefficients u_k(T) to an empirical mean and unbiased covariance.  Path
seeds derive from one master seed by path index, and results are placed
by path index, so the output is bit-identical no matter how many
workers share the chunks.  `pollute` applies the multiplicative
measurement-noise model to moments, and `relative_l2_error` is the
error metric used when reconstructions are compared against the truth.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from . import backend
from .fbm import HurstIndex, path_seed, sample_fgn_batch
from .forward import SourceSpec, SpaceTimeGrid, modulation_samples
from .spectral import project, projection_weights

__all__ = [
    "EnsembleConfig",
    "EnsembleMoments",
    "run_ensemble",
    "mean_squared_spacetime_norm",
    "pollute",
    "relative_l2_error",
]

# Paths per work unit.  Fixed: chunk boundaries are part of the
# deterministic arithmetic, workers only decide who computes a chunk.
_CHUNK = 256

_SOLVERS = ("fd", "spectral")


@dataclass(frozen=True)
class EnsembleConfig:
    """Everything that determines an ensemble, seeds included."""

    grid: SpaceTimeGrid
    source: SourceSpec
    hurst: HurstIndex
    n_paths: int
    n_modes: int
    master_seed: int
    solver: str = "fd"

    def __post_init__(self):
        if self.n_paths < 2:
            raise ValueError("n_paths must be at least 2")
        if self.n_modes < 1:
            raise ValueError("n_modes must be at least 1")
        if self.solver not in _SOLVERS:
            raise ValueError(
                f"unknown solver {self.solver!r}, expected one of {_SOLVERS}"
            )


@dataclass(frozen=True)
class EnsembleMoments:
    """Empirical moments of u_k(T), k = 1..n_modes, over n_paths paths."""

    mean: np.ndarray
    cov: np.ndarray
    n_paths: int
    std_err_mean: np.ndarray
    coeffs: Optional[np.ndarray] = None

    @property
    def n_modes(self) -> int:
        return self.mean.size


def _path_increments(cfg: EnsembleConfig, lo: int, hi: int) -> np.ndarray:
    seeds = [path_seed(cfg.master_seed, i) for i in range(lo, hi)]
    return sample_fgn_batch(cfg.grid.n_t, cfg.grid.h_t, cfg.hurst, seeds)


def _fd_chunk(cfg, proj, want_ss, lo, hi):
    """Coefficients (and optional squared-norm track) for paths lo..hi-1."""
    grid = cfg.grid
    incs = _path_increments(cfg, lo, hi)
    betas = np.zeros((hi - lo, grid.n_t + 1))
    betas[:, 1:] = incs / grid.h_t
    r2 = (grid.h_t / grid.spatial.h_x) ** 2
    u_final, ss = backend.fd_evolve_sep_batch(
        cfg.source.f_samples,
        cfg.source.g_samples,
        modulation_samples(cfg.source, grid),
        betas,
        r2,
        grid.h_t**2,
        want_ss,
    )
    return u_final @ proj, ss


def _spectral_chunk(cfg, det_final, gk, noise_weights, lo, hi):
    incs = _path_increments(cfg, lo, hi)
    return det_final[None, :] + gk[None, :] * (incs @ noise_weights.T)


def _spectral_setup(cfg: EnsembleConfig):
    """Deterministic coefficient part and noise weights shared by chunks."""
    grid = cfg.grid
    alpha = modulation_samples(cfg.source, grid)
    ks = np.arange(1, cfg.n_modes + 1)
    fk = np.array([project(cfg.source.f_samples, k, grid.spatial) for k in ks])
    gk = np.array([project(cfg.source.g_samples, k, grid.spatial) for k in ks])

    times = grid.times
    det_final = np.empty(cfg.n_modes)
    for j, k in enumerate(ks):
        kernel = np.sin(k * (grid.t_final - times)) / k
        det_final[j] = fk[j] * trapezoid(alpha * kernel, dx=grid.h_t)
    tau = times[:-1]
    noise_weights = np.sin(ks[:, None] * (grid.t_final - tau)[None, :]) / ks[:, None]
    return det_final, gk, noise_weights


def _run_chunks(cfg: EnsembleConfig, workers: int, chunk_fn, collect):
    """Apply chunk_fn over fixed path ranges, in order or on a pool."""
    spans = [
        (lo, min(lo + _CHUNK, cfg.n_paths)) for lo in range(0, cfg.n_paths, _CHUNK)
    ]
    if workers <= 1:
        for lo, hi in spans:
            collect(lo, hi, chunk_fn(lo, hi))
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = pool.map(lambda span: chunk_fn(*span), spans)
        for (lo, hi), res in zip(spans, results):
            collect(lo, hi, res)


def _check_finite(coeffs: np.ndarray, lo: int) -> None:
    bad = ~np.isfinite(coeffs).all(axis=1)
    if bad.any():
        raise RuntimeError(
            f"solver produced non-finite coefficients on path "
            f"{lo + int(np.argmax(bad))}"
        )


def run_ensemble(
    cfg: EnsembleConfig,
    workers: int = 1,
    keep_coeffs: bool = False,
) -> EnsembleMoments:
    """Estimate mean and covariance of u_k(T) over cfg.n_paths paths.

    Path i is driven by the fBm seeded with path_seed(master_seed, i);
    the reduction is a fixed-order combine over a fixed chunk layout, so
    the moments do not depend on `workers`.  With keep_coeffs the raw
    (n_paths, n_modes) coefficient array is retained for bootstrap use.

    Returns
    -------
    EnsembleMoments with unbiased covariance (divisor n_paths - 1) and
    per-entry standard errors of the mean.
    """
    coeffs = np.empty((cfg.n_paths, cfg.n_modes))

    if cfg.solver == "fd":
        proj = projection_weights(cfg.n_modes, cfg.grid.spatial)

        def chunk_fn(lo, hi):
            return _fd_chunk(cfg, proj, False, lo, hi)[0]

    else:
        det_final, gk, noise_weights = _spectral_setup(cfg)

        def chunk_fn(lo, hi):
            return _spectral_chunk(cfg, det_final, gk, noise_weights, lo, hi)

    def collect(lo, hi, res):
        _check_finite(res, lo)
        coeffs[lo:hi] = res

    _run_chunks(cfg, workers, chunk_fn, collect)

    mean = coeffs.mean(axis=0)
    cov = np.atleast_2d(np.cov(coeffs, rowvar=False, ddof=1))
    cov = 0.5 * (cov + cov.T)
    std_err = np.sqrt(np.diag(cov) / cfg.n_paths)
    return EnsembleMoments(
        mean=mean,
        cov=cov,
        n_paths=cfg.n_paths,
        std_err_mean=std_err,
        coeffs=coeffs if keep_coeffs else None,
    )


def mean_squared_spacetime_norm(
    cfg: EnsembleConfig,
    workers: int = 1,
) -> tuple[float, float]:
    """Monte Carlo estimate of E ||u||^2 over D x [0, T], with std error.

    Per path the squared space-time L2 norm is a trapezoid reduction of
    the finite-difference field; only the fd solver carries the full
    field, so cfg.solver must be "fd".
    """
    if cfg.solver != "fd":
        raise ValueError("space-time norm needs the fd solver")
    grid = cfg.grid
    proj = projection_weights(1, grid.spatial)
    norms = np.empty(cfg.n_paths)

    def chunk_fn(lo, hi):
        return _fd_chunk(cfg, proj, True, lo, hi)

    def collect(lo, hi, res):
        _, ss = res
        # boundary nodes are zero, so the spatial trapezoid is h_x * ss
        time_sum = ss.sum(axis=1) - 0.5 * (ss[:, 0] + ss[:, -1])
        norms[lo:hi] = grid.spatial.h_x * grid.h_t * time_sum

    _run_chunks(cfg, workers, chunk_fn, collect)
    return float(norms.mean()), float(norms.std(ddof=1) / np.sqrt(cfg.n_paths))


def pollute(moments: EnsembleMoments, delta: float, seed: int) -> EnsembleMoments:
    """Multiplicative measurement noise x -> x (1 + delta U), U ~ U(-1,1).

    Every mean and covariance entry gets an independent draw; the
    covariance is re-symmetrized by averaging with its transpose.
    delta=0 returns the moments unchanged.
    """
    if delta < 0.0:
        raise ValueError("delta must be nonnegative")
    if delta == 0.0:
        return replace(moments)
    rng = np.random.default_rng(seed)
    n = moments.n_modes
    mean = moments.mean * (1.0 + delta * rng.uniform(-1.0, 1.0, size=n))
    cov = moments.cov * (1.0 + delta * rng.uniform(-1.0, 1.0, size=(n, n)))
    cov = 0.5 * (cov + cov.T)
    return replace(moments, mean=mean, cov=cov)


def relative_l2_error(exact: np.ndarray, approx: np.ndarray) -> float:
    """||approx - exact|| / ||exact|| in the trapezoid L2 norm.

    Both arrays must sample the same uniform grid (the grid spacing
    cancels in the ratio).  A zero exact field makes the relative error
    undefined; the absolute norm is returned with a warning.
    """
    exact = np.asarray(exact, dtype=float)
    approx = np.asarray(approx, dtype=float)
    if exact.shape != approx.shape:
        raise ValueError(
            f"grids differ: exact has shape {exact.shape}, "
            f"approx has shape {approx.shape}"
        )
    diff = np.sqrt(np.trapezoid((approx - exact) ** 2))
    denom = np.sqrt(np.trapezoid(exact**2))
    if denom == 0.0:
        warnings.warn(
            "exact field is identically zero; returning the absolute norm",
            stacklevel=2,
        )
        return float(diff)
    return float(diff / denom)
