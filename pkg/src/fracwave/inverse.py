"""Source recovery from final-time moments by kernel division.

The final-time coefficients satisfy E[u_k(T)] = f_k h_k / k and
Cov(u_k(T), u_l(T)) = g_k g_l E_kl, so dividing measured moments by the
kernel table recovers the first N source coefficients.  The division is
ill posed (h_k / k and E_kl decay with k), and the regularization is
pure spectral truncation: keep N modes, zero any mode whose divisor
falls below a floor, and synthesize on the grid.  g is identified only
through its products, hence up to sign; `extract_g_up_to_sign` factors
the product matrix when a signed representative is wanted, while the
g^2 field is synthesized directly from the products.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .estimator import EnsembleMoments, relative_l2_error
from .forward import SourceSpec
from .kernels import INVERTIBILITY_FLOOR, KernelTable
from .spectral import SpatialGrid, synthesize, synthesize_rank2

__all__ = [
    "ReconstructionResult",
    "recover_f_coeffs",
    "recover_g_products",
    "extract_g_up_to_sign",
    "reconstruct_fields",
]


@dataclass(frozen=True)
class ReconstructionResult:
    """Recovered coefficients and fields, with error metrics if truth known."""

    f_coeffs: np.ndarray
    g_products: np.ndarray
    f_field: np.ndarray
    g2_field: np.ndarray
    rel_err_f: Optional[float]
    rel_err_g2: Optional[float]
    skipped_modes: list[int]


def _check_table(n: int, table: KernelTable) -> None:
    if table.n_modes < n:
        raise ValueError(
            f"kernel table holds {table.n_modes} modes, {n} requested"
        )


def recover_f_coeffs(mean: np.ndarray, table: KernelTable) -> np.ndarray:
    """f_k = m_k k / h_k for every mode with |h_k| above the floor.

    Modes whose h_k falls below the floor are zeroed (they carry no
    stable information); if every mode is floored the reconstruction is
    impossible and an error is raised.
    """
    mean = np.asarray(mean, dtype=float)
    n = mean.size
    _check_table(n, table)
    hk = table.hk[:n]
    usable = np.abs(hk) >= INVERTIBILITY_FLOOR
    if not usable.any():
        raise ValueError(
            "every h_k lies below the invertibility floor; "
            "f cannot be reconstructed"
        )
    ks = np.arange(1, n + 1)
    coeffs = np.zeros(n)
    coeffs[usable] = mean[usable] * ks[usable] / hk[usable]
    return coeffs


def recover_g_products(cov: np.ndarray, table: KernelTable) -> np.ndarray:
    """G_kl = C_kl / E_kl wherever |E_kl| is above the floor, else 0."""
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError("covariance must be a square matrix")
    n = cov.shape[0]
    _check_table(n, table)
    scale = max(float(np.abs(cov).max()), 1e-300)
    if np.abs(cov - cov.T).max() > 1e-8 * scale:
        raise ValueError("covariance matrix must be symmetric")
    ekl = table.ekl[:n, :n]
    usable = np.abs(ekl) >= INVERTIBILITY_FLOOR
    if not usable.any():
        raise ValueError(
            "every E_kl lies below the invertibility floor; "
            "g products cannot be reconstructed"
        )
    products = np.zeros_like(cov)
    products[usable] = cov[usable] / ekl[usable]
    return 0.5 * (products + products.T)


def extract_g_up_to_sign(products: np.ndarray) -> np.ndarray:
    """Rank-1 factor of a product matrix, pivot entry nonnegative.

    For products = g g^T the result is g up to one global sign.  The
    pivot is the largest diagonal entry; a nonpositive pivot means the
    matrix carries no usable rank-1 structure.
    """
    products = np.asarray(products, dtype=float)
    if products.ndim != 2 or products.shape[0] != products.shape[1]:
        raise ValueError("product matrix must be square")
    scale = max(float(np.abs(products).max()), 1e-300)
    if np.abs(products - products.T).max() > 1e-8 * scale:
        raise ValueError("product matrix must be symmetric")
    pivot = int(np.argmax(np.diag(products)))
    gpp = products[pivot, pivot]
    if gpp <= 0.0:
        raise ValueError(
            "largest diagonal entry is not positive; cannot factor the "
            "product matrix"
        )
    gp = np.sqrt(gpp)
    return products[pivot] / gp


def reconstruct_fields(
    moments: EnsembleMoments,
    table: KernelTable,
    grid: SpatialGrid,
    truth: Optional[SourceSpec] = None,
) -> ReconstructionResult:
    """Full truncated reconstruction of f and g^2 on the grid.

    Uses exactly the first n_modes of the moments.  When a truth source
    is given, relative L2 errors are computed against its f samples and
    the nodewise square of its g samples.  skipped_modes lists every
    mode touched by a floored divisor (h_k for f, any E_kl entry for g).
    """
    n = moments.n_modes
    _check_table(n, table)
    f_coeffs = recover_f_coeffs(moments.mean, table)
    g_products = recover_g_products(moments.cov, table)
    f_field = synthesize(f_coeffs, grid)
    g2_field = synthesize_rank2(g_products, grid)

    skipped: set[int] = set()
    skipped.update(int(k) + 1 for k in np.nonzero(table.hk_flagged[:n])[0])
    flagged_pairs = np.nonzero(table.ekl_flagged[:n, :n])
    skipped.update(int(k) + 1 for k in flagged_pairs[0])
    skipped.update(int(l) + 1 for l in flagged_pairs[1])

    rel_err_f = rel_err_g2 = None
    if truth is not None:
        if truth.f_samples.size != grid.n_x + 1:
            raise ValueError("truth sources do not live on the requested grid")
        rel_err_f = relative_l2_error(truth.f_samples, f_field)
        rel_err_g2 = relative_l2_error(truth.g_samples**2, g2_field)

    return ReconstructionResult(
        f_coeffs=f_coeffs,
        g_products=g_products,
        f_field=f_field,
        g2_field=g2_field,
        rel_err_f=rel_err_f,
        rel_err_g2=rel_err_g2,
        skipped_modes=sorted(skipped),
    )
