"""Tests for the truncated moment-to-source reconstruction."""

import numpy as np
import pytest

from fracwave import (
    EnsembleMoments,
    HurstIndex,
    KernelTable,
    SpatialGrid,
    build_kernel_table,
    extract_g_up_to_sign,
    project,
    reconstruct_fields,
    recover_f_coeffs,
    recover_g_products,
    synthesize,
)

from conftest import reference_sources, small_grid


def white_table(n_modes=6):
    return build_kernel_table(np.ones(1025), 1.0, HurstIndex(0.5), n_modes)


def exact_moments(f_coeffs, g_coeffs, table):
    """Noise-free moments implied by the forward model."""
    n = f_coeffs.size
    ks = np.arange(1, n + 1)
    mean = f_coeffs * table.hk[:n] / ks
    cov = np.outer(g_coeffs, g_coeffs) * table.ekl[:n, :n]
    return EnsembleMoments(
        mean=mean,
        cov=cov,
        n_paths=10**9,
        std_err_mean=np.zeros(n),
    )


class TestRecoverF:
    def test_exact_roundtrip(self):
        table = white_table()
        f = np.array([0.3, -1.2, 0.0, 2.0, 0.1, -0.5])
        mom = exact_moments(f, np.zeros(6), table)
        got = recover_f_coeffs(mom.mean, table)
        assert np.allclose(got, f, atol=1e-12)

    def test_floored_mode_zeroed(self):
        table = white_table(4)
        broken = KernelTable(
            t_final=table.t_final,
            hurst=table.hurst,
            n_modes=4,
            hk=np.array([table.hk[0], 1e-15, table.hk[2], table.hk[3]]),
            ekl=table.ekl,
            ekl_method=table.ekl_method,
        )
        mean = np.array([0.1, 0.2, 0.3, 0.4])
        got = recover_f_coeffs(mean, broken)
        assert got[1] == 0.0
        assert got[0] != 0.0

    def test_all_floored_raises(self):
        table = white_table(2)
        dead = KernelTable(
            t_final=1.0,
            hurst=table.hurst,
            n_modes=2,
            hk=np.zeros(2),
            ekl=table.ekl,
            ekl_method=table.ekl_method,
        )
        with pytest.raises(ValueError, match="floor"):
            recover_f_coeffs(np.ones(2), dead)

    def test_table_too_small(self):
        table = white_table(2)
        with pytest.raises(ValueError):
            recover_f_coeffs(np.ones(5), table)


class TestRecoverGProducts:
    def test_exact_roundtrip(self):
        table = white_table()
        g = np.array([1.0, 0.4, -0.2, 0.0, 0.6, 0.05])
        mom = exact_moments(np.zeros(6), g, table)
        got = recover_g_products(mom.cov, table)
        assert np.allclose(got, np.outer(g, g), atol=1e-12)

    def test_rejects_asymmetric(self):
        table = white_table(3)
        cov = np.array([[1.0, 0.5, 0.0], [0.1, 1.0, 0.0], [0.0, 0.0, 1.0]])
        with pytest.raises(ValueError, match="symmetric"):
            recover_g_products(cov, table)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            recover_g_products(np.ones((2, 3)), white_table(3))

    def test_all_floored_raises(self):
        table = white_table(2)
        dead = KernelTable(
            t_final=1.0,
            hurst=table.hurst,
            n_modes=2,
            hk=table.hk,
            ekl=np.zeros((2, 2)),
            ekl_method=table.ekl_method,
        )
        with pytest.raises(ValueError, match="floor"):
            recover_g_products(np.eye(2), dead)


class TestExtractG:
    def test_recovers_up_to_sign(self):
        g = np.array([-0.3, 0.8, 0.1, 0.0])
        got = extract_g_up_to_sign(np.outer(g, g))
        assert np.allclose(got, g, atol=1e-14) or np.allclose(
            got, -g, atol=1e-14
        )

    def test_pivot_entry_nonnegative(self):
        g = np.array([-0.9, 0.2])
        got = extract_g_up_to_sign(np.outer(g, g))
        assert got[int(np.argmax(np.abs(g)))] >= 0.0

    def test_perturbation_stays_small(self):
        rng = np.random.default_rng(3)
        g = np.array([0.8, 0.5, -0.3, 0.2])
        eps = 1e-6
        noise = rng.uniform(-eps, eps, size=(4, 4))
        products = np.outer(g, g) + 0.5 * (noise + noise.T)
        got = extract_g_up_to_sign(products)
        err = min(np.abs(got - g).max(), np.abs(got + g).max())
        assert err < 3 * eps / np.abs(g).max()

    def test_nonpositive_pivot_raises(self):
        with pytest.raises(ValueError, match="diagonal"):
            extract_g_up_to_sign(-np.eye(3))

    def test_asymmetric_rejected(self):
        m = np.array([[1.0, 0.2], [0.0, 1.0]])
        with pytest.raises(ValueError):
            extract_g_up_to_sign(m)


class TestReconstructFields:
    def test_noise_free_pipeline(self):
        grid = SpatialGrid(100)
        src = reference_sources(small_grid(n_x=100, n_t=512))
        table = white_table(9)
        n = 9
        f_coeffs = np.array([project(src.f_samples, k, grid) for k in range(1, n + 1)])
        g_coeffs = np.array([project(src.g_samples, k, grid) for k in range(1, n + 1)])
        mom = exact_moments(f_coeffs, g_coeffs, table)
        res = reconstruct_fields(mom, table, grid, truth=src)
        assert res.skipped_modes == []
        # truncation alone limits the error: f = sin 3x is inside the span
        assert res.rel_err_f < 1e-10
        # g is a bump with nonzero wall values, so its sine tail decays
        # slowly; the 9-mode truncation floor sits near one percent
        assert 0.001 < res.rel_err_g2 < 0.02
        assert np.allclose(res.f_field, synthesize(f_coeffs, grid), atol=1e-12)

    def test_truncation_matches_projected_truth(self):
        # reconstruction error equals the spectral truncation error of
        # the true fields when moments are exact
        grid = SpatialGrid(100)
        src = reference_sources(small_grid(n_x=100, n_t=512))
        table = white_table(9)
        n = 9
        g_coeffs = np.array([project(src.g_samples, k, grid) for k in range(1, n + 1)])
        mom = exact_moments(np.zeros(n), g_coeffs, table)
        res = reconstruct_fields(mom, table, grid)
        g2_truncated = synthesize(g_coeffs, grid) ** 2
        assert np.allclose(res.g2_field, g2_truncated, atol=1e-10)

    def test_skipped_modes_reported(self):
        table = white_table(3)
        broken = KernelTable(
            t_final=1.0,
            hurst=table.hurst,
            n_modes=3,
            hk=np.array([table.hk[0], 1e-14, table.hk[2]]),
            ekl=table.ekl,
            ekl_method=table.ekl_method,
        )
        grid = SpatialGrid(40)
        mom = exact_moments(np.ones(3), np.ones(3), broken)
        res = reconstruct_fields(mom, broken, grid)
        assert res.skipped_modes == [2]

    def test_truth_grid_mismatch(self):
        grid = SpatialGrid(50)
        src = reference_sources(small_grid(n_x=100, n_t=512))
        table = white_table(3)
        mom = exact_moments(np.ones(3), np.ones(3), table)
        with pytest.raises(ValueError):
            reconstruct_fields(mom, table, grid, truth=src)
