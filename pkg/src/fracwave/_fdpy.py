"""Numpy implementation of the explicit wave stencil.

Reference backend; `fracwave._fdcore` is the compiled mirror.  Both
compute identical arithmetic (same association order, no FMA), so their
fields agree bit for bit.

The scheme advances u_tt = u_xx + F with zero initial data and Dirichlet
walls:

    u[n+1,i] = 2 u[n,i] - u[n-1,i]
               + r^2 (u[n,i-1] - 2 u[n,i] + u[n,i+1]) + ht^2 F[n,i],

seeded by the ghost half-step u[1,i] = u[0,i] + (r^2 lap(u[0]) +
ht^2 F[0,i]) / 2.  Separable forcing F[n,i] = fx[i] a[n] + gx[i] b[n]
covers the driven problem (a from the modulation, b from noise
increments).
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def fd_evolve_table(
    forcing: np.ndarray, r2: float, ht2: float, u0: np.ndarray | None = None
) -> np.ndarray:
    """Advance the stencil under a full forcing table.

    forcing has shape (n_t + 1, n_x + 1); row n is F at time level n
    (the last row is unused).  u0 is an optional initial displacement
    (zero initial velocity either way).  Returns the full field with
    the same shape.
    """
    forcing = np.asarray(forcing, dtype=float)
    n_t = forcing.shape[0] - 1
    u = np.zeros_like(forcing)
    if u0 is not None:
        u[0] = np.asarray(u0, dtype=float)
    u[1, 1:-1] = u[0, 1:-1] + 0.5 * (
        r2 * (u[0, :-2] - 2.0 * u[0, 1:-1] + u[0, 2:]) + ht2 * forcing[0, 1:-1]
    )
    for n in range(1, n_t):
        u[n + 1, 1:-1] = (
            2.0 * u[n, 1:-1]
            - u[n - 1, 1:-1]
            + r2 * (u[n, :-2] - 2.0 * u[n, 1:-1] + u[n, 2:])
            + ht2 * forcing[n, 1:-1]
        )
    return u


def fd_evolve_sep(
    fx: np.ndarray,
    gx: np.ndarray,
    alpha: np.ndarray,
    beta: np.ndarray,
    r2: float,
    ht2: float,
) -> np.ndarray:
    """Advance one path under separable forcing, keeping the full field."""
    fx = np.asarray(fx, dtype=float)
    gx = np.asarray(gx, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    n_t = alpha.size - 1
    u = np.zeros((n_t + 1, fx.size))
    force = ht2 * (fx[1:-1] * alpha[0] + gx[1:-1] * beta[0])
    u[1, 1:-1] = 0.5 * (r2 * (u[0, :-2] - 2.0 * u[0, 1:-1] + u[0, 2:]) + force)
    for n in range(1, n_t):
        force = ht2 * (fx[1:-1] * alpha[n] + gx[1:-1] * beta[n])
        u[n + 1, 1:-1] = (
            2.0 * u[n, 1:-1]
            - u[n - 1, 1:-1]
            + r2 * (u[n, :-2] - 2.0 * u[n, 1:-1] + u[n, 2:])
            + force
        )
    return u


def fd_evolve_sep_batch(
    fx: np.ndarray,
    gx: np.ndarray,
    alpha: np.ndarray,
    betas: np.ndarray,
    r2: float,
    ht2: float,
    want_ss: bool = False,
):
    """Advance a batch of paths that share fx, gx, alpha.

    betas has one row per path.  Returns (u_final, ss) where u_final is
    (n_paths, n_x + 1) at the last time level and ss, when requested,
    holds the nodewise sum of squares of the field at every level,
    shape (n_paths, n_t + 1); otherwise ss is None.
    """
    fx = np.asarray(fx, dtype=float)
    gx = np.asarray(gx, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    betas = np.asarray(betas, dtype=float)
    n_t = alpha.size - 1
    n_paths = betas.shape[0]
    prev = np.zeros((n_paths, fx.size))
    curr = np.zeros_like(prev)
    ss = np.zeros((n_paths, n_t + 1)) if want_ss else None

    force = ht2 * (fx[1:-1] * alpha[0] + gx[1:-1] * betas[:, 0:1])
    curr[:, 1:-1] = 0.5 * (
        r2 * (prev[:, :-2] - 2.0 * prev[:, 1:-1] + prev[:, 2:]) + force
    )
    if want_ss:
        ss[:, 1] = (curr * curr).sum(axis=1)
    for n in range(1, n_t):
        force = ht2 * (fx[1:-1] * alpha[n] + gx[1:-1] * betas[:, n : n + 1])
        nxt = (
            2.0 * curr[:, 1:-1]
            - prev[:, 1:-1]
            + r2 * (curr[:, :-2] - 2.0 * curr[:, 1:-1] + curr[:, 2:])
            + force
        )
        prev, curr = curr, prev
        curr[:, 1:-1] = nxt
        if want_ss:
            ss[:, n + 1] = (curr * curr).sum(axis=1)
    return curr, ss
