# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled mirror of the numpy stencil backend.

Same arithmetic and association order as ``fracwave._fdpy``; built with
FP contraction disabled so fields from the two backends match bit for
bit.  Only the squared-norm track (ss) may differ at round-off, since
numpy sums it pairwise.
"""

import numpy as np

BACKEND_NAME = "compiled"


def fd_evolve_table(forcing, double r2, double ht2, u0=None):
    """Advance the stencil under a full forcing table (see _fdpy)."""
    forcing = np.ascontiguousarray(forcing, dtype=np.float64)
    cdef double[:, ::1] f = forcing
    cdef Py_ssize_t n_t = f.shape[0] - 1
    cdef Py_ssize_t n_x = f.shape[1] - 1
    u_arr = np.zeros((n_t + 1, n_x + 1))
    if u0 is not None:
        u_arr[0] = np.asarray(u0, dtype=np.float64)
    cdef double[:, ::1] u = u_arr
    cdef Py_ssize_t n, i
    for i in range(1, n_x):
        u[1, i] = u[0, i] + 0.5 * (
            r2 * (u[0, i - 1] - 2.0 * u[0, i] + u[0, i + 1]) + ht2 * f[0, i]
        )
    for n in range(1, n_t):
        for i in range(1, n_x):
            u[n + 1, i] = (
                2.0 * u[n, i]
                - u[n - 1, i]
                + r2 * (u[n, i - 1] - 2.0 * u[n, i] + u[n, i + 1])
                + ht2 * f[n, i]
            )
    return u_arr


def fd_evolve_sep(fx, gx, alpha, beta, double r2, double ht2):
    """Advance one path under separable forcing, keeping the full field."""
    fx = np.ascontiguousarray(fx, dtype=np.float64)
    gx = np.ascontiguousarray(gx, dtype=np.float64)
    alpha = np.ascontiguousarray(alpha, dtype=np.float64)
    beta = np.ascontiguousarray(beta, dtype=np.float64)
    cdef double[::1] fxv = fx
    cdef double[::1] gxv = gx
    cdef double[::1] av = alpha
    cdef double[::1] bv = beta
    cdef Py_ssize_t n_t = av.shape[0] - 1
    cdef Py_ssize_t n_x = fxv.shape[0] - 1
    u_arr = np.zeros((n_t + 1, n_x + 1))
    cdef double[:, ::1] u = u_arr
    cdef Py_ssize_t n, i
    for i in range(1, n_x):
        u[1, i] = 0.5 * (
            r2 * (u[0, i - 1] - 2.0 * u[0, i] + u[0, i + 1])
            + ht2 * (fxv[i] * av[0] + gxv[i] * bv[0])
        )
    for n in range(1, n_t):
        for i in range(1, n_x):
            u[n + 1, i] = (
                2.0 * u[n, i]
                - u[n - 1, i]
                + r2 * (u[n, i - 1] - 2.0 * u[n, i] + u[n, i + 1])
                + ht2 * (fxv[i] * av[n] + gxv[i] * bv[n])
            )
    return u_arr


def fd_evolve_sep_batch(fx, gx, alpha, betas, double r2, double ht2,
                        bint want_ss=False):
    """Advance a batch of paths sharing fx, gx, alpha (see _fdpy)."""
    fx = np.ascontiguousarray(fx, dtype=np.float64)
    gx = np.ascontiguousarray(gx, dtype=np.float64)
    alpha = np.ascontiguousarray(alpha, dtype=np.float64)
    betas = np.ascontiguousarray(betas, dtype=np.float64)
    cdef double[::1] fxv = fx
    cdef double[::1] gxv = gx
    cdef double[::1] av = alpha
    cdef double[:, ::1] bv = betas
    cdef Py_ssize_t n_paths = bv.shape[0]
    cdef Py_ssize_t n_t = av.shape[0] - 1
    cdef Py_ssize_t n_x = fxv.shape[0] - 1

    out_arr = np.zeros((n_paths, n_x + 1))
    ss_arr = np.zeros((n_paths, n_t + 1)) if want_ss else np.zeros((1, 1))
    work_arr = np.zeros((3, n_x + 1))
    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] ss = ss_arr
    cdef double[:, ::1] w = work_arr
    cdef Py_ssize_t p, n, i, ip, ic, nx_
    cdef double a, b, acc

    with nogil:
        for p in range(n_paths):
            for i in range(n_x + 1):
                w[0, i] = 0.0
                w[1, i] = 0.0
                w[2, i] = 0.0
            ip = 0
            ic = 1
            a = av[0]
            b = bv[p, 0]
            for i in range(1, n_x):
                w[ic, i] = 0.5 * (
                    r2 * (w[ip, i - 1] - 2.0 * w[ip, i] + w[ip, i + 1])
                    + ht2 * (fxv[i] * a + gxv[i] * b)
                )
            if want_ss:
                acc = 0.0
                for i in range(n_x + 1):
                    acc += w[ic, i] * w[ic, i]
                ss[p, 1] = acc
            for n in range(1, n_t):
                nx_ = 3 - ip - ic
                a = av[n]
                b = bv[p, n]
                for i in range(1, n_x):
                    w[nx_, i] = (
                        2.0 * w[ic, i]
                        - w[ip, i]
                        + r2 * (w[ic, i - 1] - 2.0 * w[ic, i] + w[ic, i + 1])
                        + ht2 * (fxv[i] * a + gxv[i] * b)
                    )
                ip = ic
                ic = nx_
                if want_ss:
                    acc = 0.0
                    for i in range(n_x + 1):
                        acc += w[ic, i] * w[ic, i]
                    ss[p, n + 1] = acc
            for i in range(n_x + 1):
                out[p, i] = w[ic, i]

    return out_arr, (ss_arr if want_ss else None)
