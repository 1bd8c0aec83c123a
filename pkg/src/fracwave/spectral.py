"""Dirichlet eigenbasis of -d2/dx2 on (0, pi) and grid transforms.

The eigenpairs are lambda_k = k^2 with phi_k(x) = sqrt(2/pi) sin(kx),
orthonormal in L2(0, pi).  Fields live on a uniform grid of n_x + 1
nodes including both endpoints; projections use the trapezoid rule,
which is exact for products of these modes as long as k stays well
below the grid Nyquist limit.  All transforms enforce k <= n_x / 4.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DOMAIN_LENGTH",
    "SpatialGrid",
    "EigenMode",
    "eigenpair",
    "max_mode",
    "project",
    "synthesize",
    "synthesize_rank2",
]

DOMAIN_LENGTH = np.pi

# Tolerated asymmetry in a rank-2 coefficient matrix, relative to its scale.
_SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform grid on [0, pi] with n_x cells (n_x + 1 nodes)."""

    n_x: int

    def __post_init__(self):
        if self.n_x < 2:
            raise ValueError("grid needs at least 2 cells")

    @property
    def h_x(self) -> float:
        return DOMAIN_LENGTH / self.n_x

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, DOMAIN_LENGTH, self.n_x + 1)


@dataclass(frozen=True)
class EigenMode:
    """Eigenpair (k^2, phi_k) sampled on a grid."""

    k: int
    eigenvalue: float
    values: np.ndarray


def max_mode(grid: SpatialGrid) -> int:
    """Largest mode index the grid resolves without aliasing risk."""
    return grid.n_x // 4


def _check_mode(k: int, grid: SpatialGrid) -> None:
    if k < 1:
        raise ValueError(f"mode index must be a positive integer, got {k}")
    bound = max_mode(grid)
    if k > bound:
        raise ValueError(
            f"mode {k} exceeds the aliasing bound {bound} for n_x={grid.n_x}"
        )


def eigenpair(k: int, grid: SpatialGrid) -> EigenMode:
    """Return the k-th Dirichlet eigenpair sampled on the grid nodes."""
    _check_mode(k, grid)
    phi = np.sqrt(2.0 / DOMAIN_LENGTH) * np.sin(k * grid.nodes)
    return EigenMode(k=k, eigenvalue=float(k * k), values=phi)


def _check_field(field: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    field = np.asarray(field, dtype=float)
    if field.shape != (grid.n_x + 1,):
        raise ValueError(
            f"field has {field.shape[0] if field.ndim == 1 else field.shape} "
            f"values, grid has {grid.n_x + 1} nodes"
        )
    return field

def project(field: np.ndarray, k: int, grid: SpatialGrid) -> float:
    """Trapezoid approximation of the L2 inner product (field, phi_k)."""
    field = _check_field(field, grid)
    mode = eigenpair(k, grid)
    return float(np.trapezoid(field * mode.values, dx=grid.h_x))


def mode_matrix(n_modes: int, grid: SpatialGrid) -> np.ndarray:
    """Stack phi_1 ... phi_N on the grid as an (N, n_x + 1) array."""
    _check_mode(n_modes, grid)
    ks = np.arange(1, n_modes + 1)
    return np.sqrt(2.0 / DOMAIN_LENGTH) * np.sin(ks[:, None] * grid.nodes[None, :])


def projection_weights(n_modes: int, grid: SpatialGrid) -> np.ndarray:
    """Matrix P with P[i, k-1] = w_i phi_k(x_i), so coeffs = field @ P.

    w carries the trapezoid weights; applying P to a field equals
    `project` for every mode up to round-off.
    """
    phi = mode_matrix(n_modes, grid)
    w = np.full(grid.n_x + 1, grid.h_x)
    w[0] *= 0.5
    w[-1] *= 0.5
    return (phi * w[None, :]).T


def synthesize(coeffs: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """Evaluate sum_k coeffs[k-1] phi_k on the grid nodes."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 1 or coeffs.size < 1:
        raise ValueError("coeffs must be a nonempty 1-d array")
    phi = mode_matrix(coeffs.size, grid)
    return coeffs @ phi


def synthesize_rank2(matrix: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """Evaluate the diagonal restriction sum_{k,l} M[k,l] phi_k phi_l.

    The coefficient matrix must be symmetric; for M = c c^T the result
    is the pointwise square of synthesize(c).
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("coefficient matrix must be square")
    scale = max(float(np.abs(matrix).max()), 1e-300)
    if np.abs(matrix - matrix.T).max() > _SYMMETRY_TOL * scale:
        raise ValueError("coefficient matrix must be symmetric")
    phi = mode_matrix(matrix.shape[0], grid)
    return np.einsum("ki,kl,li->i", phi, matrix, phi)
