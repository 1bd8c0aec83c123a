"""Forward solvers for the driven wave equation on (0, pi).

The model problem is

    u_tt - u_xx = f(x) h(t) + g(x) dB_H/dt,   u = 0 on the boundary,

with zero initial data and fractional Brownian driving.  Two routes are
provided: an explicit finite-difference scheme on the full space-time
grid (`solve_fd`, stable under the Courant condition h_t <= h_x) and a
truncated eigenfunction expansion that integrates each mode's Duhamel
form exactly in space (`solve_spectral`).  Both consume the same
sampled-path object, so they can be cross-checked pathwise.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import backend
from .fbm import FbmPath
from .spectral import SpatialGrid, project

__all__ = [
    "CourantError",
    "SpaceTimeGrid",
    "SourceSpec",
    "WaveField",
    "SpectralTrajectory",
    "solve_fd",
    "solve_spectral",
    "final_time_coeffs",
]


class CourantError(ValueError):
    """Raised when the explicit scheme would be unstable."""


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Uniform grid with n_t time cells on [0, T] over a spatial grid."""

    spatial: SpatialGrid
    n_t: int
    t_final: float

    def __post_init__(self):
        if self.n_t < 1:
            raise ValueError("n_t must be at least 1")
        if self.t_final <= 0.0:
            raise ValueError("t_final must be positive")
        if self.h_t > self.spatial.h_x * (1.0 + 1e-12):
            raise CourantError(
                f"explicit scheme unstable: h_t={self.h_t:.6g} exceeds "
                f"h_x={self.spatial.h_x:.6g}"
            )

    @property
    def h_t(self) -> float:
        return self.t_final / self.n_t

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_final, self.n_t + 1)


@dataclass(frozen=True)
class SourceSpec:
    """Grid samples of the spatial sources f, g and the modulation h.

    f_samples and g_samples live on the spatial nodes (n_x + 1 values),
    h_samples on the time grid (n_t + 1 values).  Dirichlet consistency
    prefers f and g to vanish at the walls; nonvanishing values are
    tolerated with a warning since the solvers never read them.
    """

    f_samples: np.ndarray
    g_samples: np.ndarray
    h_samples: np.ndarray

    def __post_init__(self):
        for name in ("f_samples", "g_samples", "h_samples"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 1 or arr.size < 2:
                raise ValueError(f"{name} must be a 1-d array of grid values")
            object.__setattr__(self, name, arr)
        if self.f_samples.shape != self.g_samples.shape:
            raise ValueError("f_samples and g_samples must share the spatial grid")
        for name in ("f_samples", "g_samples"):
            arr = getattr(self, name)
            scale = max(float(np.abs(arr).max()), 1.0)
            if abs(arr[0]) > 1e-12 * scale or abs(arr[-1]) > 1e-12 * scale:
                warnings.warn(
                    f"{name} does not vanish at the domain walls; boundary "
                    "values are ignored by the Dirichlet solvers",
                    stacklevel=3,
                )
        if np.any(self.h_samples < 0.0):
            warnings.warn("h_samples has negative entries", stacklevel=3)


@dataclass(frozen=True)
class WaveField:
    """Finite-difference field u[n, i] on the full space-time grid."""

    grid: SpaceTimeGrid
    u: np.ndarray

    @property
    def final(self) -> np.ndarray:
        """Displacement at the last time level."""
        return self.u[-1]


@dataclass(frozen=True)
class SpectralTrajectory:
    """Mode coefficients u_k(t_n) split into driven and noisy parts."""

    grid: SpaceTimeGrid
    coeffs: np.ndarray
    deterministic: np.ndarray
    stochastic: np.ndarray

    @property
    def final(self) -> np.ndarray:
        """Coefficient vector u_k(T), k = 1..n_modes."""
        return self.coeffs[:, -1]


def _check_space_samples(source: SourceSpec, grid: SpaceTimeGrid) -> None:
    want = grid.spatial.n_x + 1
    if source.f_samples.size != want:
        raise ValueError(
            f"spatial sources have {source.f_samples.size} samples, "
            f"grid has {want} nodes"
        )


def modulation_samples(source: SourceSpec, grid: SpaceTimeGrid) -> np.ndarray:
    """h on the time grid, validated against n_t."""
    if source.h_samples.size != grid.n_t + 1:
        raise ValueError(
            f"h_samples has {source.h_samples.size} values, time grid "
            f"has {grid.n_t + 1} levels"
        )
    return source.h_samples


def beta_from_increments(increments: np.ndarray, h_t: float) -> np.ndarray:
    """Difference quotients of the driving path, zero at the first level."""
    beta = np.empty(increments.size + 1)
    beta[0] = 0.0
    beta[1:] = increments / h_t
    return beta


def _check_path(path: FbmPath, grid: SpaceTimeGrid) -> None:
    if path.values.size != grid.n_t + 1:
        raise ValueError(
            f"path has {path.values.size} samples, time grid has "
            f"{grid.n_t + 1} levels"
        )
    if not np.isclose(path.dt, grid.h_t, rtol=1e-9, atol=0.0):
        raise ValueError(
            f"path step {path.dt:.6g} does not match grid step {grid.h_t:.6g}"
        )


def solve_fd(
    source: Optional[SourceSpec],
    grid: SpaceTimeGrid,
    path: Optional[FbmPath],
    forcing_table: Optional[np.ndarray] = None,
    initial_displacement: Optional[np.ndarray] = None,
) -> WaveField:
    """Explicit finite-difference solve along one driving path.

    The noise enters through difference quotients of the path, so the
    discrete forcing is f(x) h(t_n) + g(x) (B(t_n) - B(t_{n-1})) / h_t.
    Returns the full field; stability was already enforced by the grid.

    A raw forcing_table of shape (n_t + 1, n_x + 1) replaces the
    separable sources entirely (source and path may then be None), and
    initial_displacement replaces the zero initial state; both exist
    for manufactured-solution and energy checks.
    """
    r2 = (grid.h_t / grid.spatial.h_x) ** 2
    ht2 = grid.h_t**2

    if forcing_table is not None:
        forcing_table = np.asarray(forcing_table, dtype=float)
        want = (grid.n_t + 1, grid.spatial.n_x + 1)
        if forcing_table.shape != want:
            raise ValueError(
                f"forcing table has shape {forcing_table.shape}, "
                f"grid wants {want}"
            )
        if initial_displacement is not None:
            initial_displacement = np.asarray(initial_displacement, dtype=float)
            if initial_displacement.shape != (grid.spatial.n_x + 1,):
                raise ValueError("initial displacement does not fit the grid")
            if initial_displacement[0] != 0.0 or initial_displacement[-1] != 0.0:
                raise ValueError("initial displacement must vanish at the walls")
        u = backend.fd_evolve_table(forcing_table, r2, ht2, initial_displacement)
        return WaveField(grid=grid, u=u)

    if initial_displacement is not None:
        raise ValueError(
            "initial displacement is only supported with a forcing table"
        )
    if source is None or path is None:
        raise ValueError("source and path are required without a forcing table")
    _check_space_samples(source, grid)
    alpha = modulation_samples(source, grid)
    _check_path(path, grid)
    beta = beta_from_increments(path.increments(), grid.h_t)
    u = backend.fd_evolve_sep(
        source.f_samples, source.g_samples, alpha, beta, r2, ht2
    )
    return WaveField(grid=grid, u=u)


def solve_spectral(
    source: SourceSpec,
    grid: SpaceTimeGrid,
    path: FbmPath,
    n_modes: int,
) -> SpectralTrajectory:
    """Truncated eigenfunction solve along one driving path.

    Each mode follows its Duhamel form

        u_k(t) = f_k int_0^t G_k(t-s) h(s) ds
                 + g_k int_0^t G_k(t-s) dB(s),

    with G_k(t) = sin(k t)/k.  The deterministic convolution uses the
    trapezoid rule and the stochastic one a left-endpoint sum, both
    O(n_t) per mode through prefix sums of sin/cos moments.
    """
    _check_space_samples(source, grid)
    alpha = modulation_samples(source, grid)
    _check_path(path, grid)
    if n_modes < 1:
        raise ValueError("n_modes must be at least 1")

    times = grid.times
    h_t = grid.h_t
    incs = path.increments()
    ks = np.arange(1, n_modes + 1)

    fk = np.array([project(source.f_samples, k, grid.spatial) for k in ks])
    gk = np.array([project(source.g_samples, k, grid.spatial) for k in ks])

    det = np.empty((n_modes, grid.n_t + 1))
    sto = np.empty((n_modes, grid.n_t + 1))
    for j, k in enumerate(ks):
        cos_kt = np.cos(k * times)
        sin_kt = np.sin(k * times)
        # sin(k(t - s)) = sin(kt) cos(ks) - cos(kt) sin(ks)
        cos_mom = cumulative_trapezoid(alpha * cos_kt, dx=h_t, initial=0.0)
        sin_mom = cumulative_trapezoid(alpha * sin_kt, dx=h_t, initial=0.0)
        det[j] = fk[j] / k * (sin_kt * cos_mom - cos_kt * sin_mom)

        cos_sum = np.concatenate([[0.0], np.cumsum(cos_kt[:-1] * incs)])
        sin_sum = np.concatenate([[0.0], np.cumsum(sin_kt[:-1] * incs)])
        sto[j] = gk[j] / k * (sin_kt * cos_sum - cos_kt * sin_sum)

    return SpectralTrajectory(
        grid=grid, coeffs=det + sto, deterministic=det, stochastic=sto
    )


def final_time_coeffs(field: WaveField, n_modes: int) -> np.ndarray:
    """Project the final-time displacement onto modes 1..n_modes."""
    if n_modes < 1:
        raise ValueError("n_modes must be at least 1")
    return np.array(
        [project(field.final, k, field.grid.spatial) for k in range(1, n_modes + 1)]
    )
