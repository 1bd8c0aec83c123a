"""Tests for the finite-difference and truncated-eigenfunction solvers."""

import numpy as np
import pytest

from fracwave import (
    CourantError,
    HurstIndex,
    SourceSpec,
    SpaceTimeGrid,
    SpatialGrid,
    final_time_coeffs,
    path_seed,
    sample_fbm_path,
    solve_fd,
    solve_spectral,
)
from fracwave.forward import beta_from_increments, modulation_samples

from conftest import reference_sources, small_grid


def zero_path(grid):
    from fracwave import fgn_to_path

    return fgn_to_path(np.zeros(grid.n_t), grid.h_t, HurstIndex(0.5), seed=0)


class TestSpaceTimeGrid:
    def test_properties(self):
        grid = SpaceTimeGrid(SpatialGrid(10), 16, 2.0)
        assert grid.h_t == pytest.approx(0.125)
        assert grid.times.size == 17
        assert grid.times[-1] == pytest.approx(2.0)

    def test_courant_violation(self):
        sp = SpatialGrid(100)
        with pytest.raises(CourantError) as err:
            SpaceTimeGrid(sp, 10, 1.0)
        assert "h_t" in str(err.value) and "h_x" in str(err.value)

    def test_courant_boundary_accepted(self):
        # h_t == h_x exactly is stable for the 1-d scheme
        sp = SpatialGrid(64)
        grid = SpaceTimeGrid(sp, 64, np.pi)
        assert grid.h_t == pytest.approx(sp.h_x)

    def test_bad_arguments(self):
        sp = SpatialGrid(10)
        with pytest.raises(ValueError):
            SpaceTimeGrid(sp, 0, 1.0)
        with pytest.raises(ValueError):
            SpaceTimeGrid(sp, 16, -1.0)


class TestSourceSpec:
    def test_wall_values_warn(self):
        x = SpatialGrid(20).nodes
        with pytest.warns(UserWarning, match="vanish at the domain walls"):
            SourceSpec(np.cos(x), np.sin(x), np.ones(8))

    def test_negative_modulation_warns(self):
        x = SpatialGrid(20).nodes
        h = np.linspace(-0.1, 1.0, 8)
        with pytest.warns(UserWarning, match="negative"):
            SourceSpec(np.sin(x), np.sin(2 * x), h)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            SourceSpec(np.zeros(5), np.zeros(6), np.ones(4))

    def test_modulation_length_checked(self):
        grid = small_grid(n_x=20, n_t=64)
        x = grid.spatial.nodes
        src = SourceSpec(np.sin(x), np.sin(x), np.ones(10))
        with pytest.raises(ValueError):
            modulation_samples(src, grid)


class TestPathCoupling:
    def test_beta_starts_at_zero(self):
        beta = beta_from_increments(np.array([0.2, -0.1]), 0.1)
        assert beta[0] == 0.0
        assert np.allclose(beta[1:], [2.0, -1.0])

    def test_wrong_path_length_rejected(self):
        grid = small_grid(n_x=30, n_t=128)
        src = reference_sources(grid)
        path = sample_fbm_path(64, grid.h_t, HurstIndex(0.5), seed=1)
        with pytest.raises(ValueError):
            solve_fd(src, grid, path)

    def test_wrong_path_step_rejected(self):
        grid = small_grid(n_x=30, n_t=128)
        src = reference_sources(grid)
        path = sample_fbm_path(grid.n_t, grid.h_t * 2, HurstIndex(0.5), seed=1)
        with pytest.raises(ValueError):
            solve_spectral(src, grid, path, 4)


class TestFiniteDifference:
    def test_zero_sources_zero_field(self):
        grid = small_grid(n_x=24, n_t=96)
        x = grid.spatial.nodes
        src = SourceSpec(np.zeros_like(x), np.zeros_like(x), np.ones(grid.n_t + 1))
        field = solve_fd(src, grid, zero_path(grid))
        assert np.all(field.u == 0.0)

    def test_manufactured_solution(self):
        # u* = t^2 sin x solves u_tt - u_xx = (2 + t^2) sin x from rest
        grid = small_grid(n_x=50, n_t=400)
        x = grid.spatial.nodes
        t = grid.times
        table = (2.0 + t[:, None] ** 2) * np.sin(x)[None, :]
        field = solve_fd(None, grid, None, forcing_table=table)
        exact = t[-1] ** 2 * np.sin(x)
        err = np.abs(field.final - exact).max()
        assert err < 5e-4

    def test_manufactured_second_order(self):
        errs = []
        for n_x, n_t in [(40, 320), (80, 640)]:
            grid = small_grid(n_x=n_x, n_t=n_t)
            x, t = grid.spatial.nodes, grid.times
            table = (2.0 + t[:, None] ** 2) * np.sin(x)[None, :]
            field = solve_fd(None, grid, None, forcing_table=table)
            errs.append(np.abs(field.final - t[-1] ** 2 * np.sin(x)).max())
        assert errs[0] / errs[1] > 3.5

    def test_linearity_in_forcing(self):
        grid = small_grid(n_x=32, n_t=128)
        rng = np.random.default_rng(12)
        shape = (grid.n_t + 1, grid.spatial.n_x + 1)
        f1 = rng.standard_normal(shape)
        f2 = rng.standard_normal(shape)
        u1 = solve_fd(None, grid, None, forcing_table=f1).u
        u2 = solve_fd(None, grid, None, forcing_table=f2).u
        u12 = solve_fd(None, grid, None, forcing_table=2 * f1 + 3 * f2).u
        scale = np.abs(u12).max()
        assert np.abs(u12 - (2 * u1 + 3 * u2)).max() < 1e-12 * max(scale, 1.0)

    def test_free_oscillation(self):
        # u0 = sin x with no forcing evolves as cos(t) sin(x)
        grid = small_grid(n_x=100, n_t=800)
        x, t = grid.spatial.nodes, grid.times
        table = np.zeros((grid.n_t + 1, grid.spatial.n_x + 1))
        u0 = np.sin(x)
        u0[-1] = 0.0
        field = solve_fd(
            None, grid, None, forcing_table=table, initial_displacement=u0
        )
        exact = np.cos(t[-1]) * np.sin(x)
        assert np.abs(field.final - exact).max() < 2e-3

    def test_table_shape_checked(self):
        grid = small_grid(n_x=20, n_t=64)
        with pytest.raises(ValueError):
            solve_fd(None, grid, None, forcing_table=np.zeros((10, 10)))

    def test_initial_displacement_rules(self):
        grid = small_grid(n_x=20, n_t=64)
        src = reference_sources(grid)
        with pytest.raises(ValueError):
            solve_fd(src, grid, zero_path(grid), initial_displacement=np.zeros(21))
        table = np.zeros((grid.n_t + 1, 21))
        bad = np.ones(21)
        with pytest.raises(ValueError):
            solve_fd(None, grid, None, forcing_table=table, initial_displacement=bad)

    def test_requires_source_or_table(self):
        grid = small_grid(n_x=20, n_t=64)
        with pytest.raises(ValueError):
            solve_fd(None, grid, None)

    def test_deterministic_along_path(self):
        grid = small_grid(n_x=40, n_t=256)
        src = reference_sources(grid)
        path = sample_fbm_path(
            grid.n_t, grid.h_t, HurstIndex(0.8), seed=path_seed(3, 0)
        )
        a = solve_fd(src, grid, path)
        b = solve_fd(src, grid, path)
        assert np.array_equal(a.u, b.u)


class TestSpectralSolver:
    def test_matches_fd_along_path(self):
        hurst = HurstIndex(0.7)
        diffs = []
        for n_x, n_t in [(60, 512), (120, 1024)]:
            grid = small_grid(n_x=n_x, n_t=n_t)
            src = reference_sources(grid)
            path = sample_fbm_path(grid.n_t, grid.h_t, hurst, seed=path_seed(99, 0))
            fd_coeffs = final_time_coeffs(solve_fd(src, grid, path), 8)
            traj = solve_spectral(src, grid, path, 8)
            diffs.append(np.abs(fd_coeffs - traj.final).max())
        assert diffs[0] < 5e-3
        assert diffs[1] < diffs[0]

    def test_split_adds_up(self):
        grid = small_grid(n_x=40, n_t=256)
        src = reference_sources(grid)
        path = sample_fbm_path(grid.n_t, grid.h_t, HurstIndex(0.5), seed=5)
        traj = solve_spectral(src, grid, path, 6)
        assert np.allclose(
            traj.coeffs, traj.deterministic + traj.stochastic, atol=1e-15
        )
        assert traj.final.shape == (6,)

    def test_deterministic_part_ignores_path(self):
        grid = small_grid(n_x=40, n_t=256)
        src = reference_sources(grid)
        p1 = sample_fbm_path(grid.n_t, grid.h_t, HurstIndex(0.5), seed=1)
        p2 = sample_fbm_path(grid.n_t, grid.h_t, HurstIndex(0.5), seed=2)
        t1 = solve_spectral(src, grid, p1, 5)
        t2 = solve_spectral(src, grid, p2, 5)
        assert np.array_equal(t1.deterministic, t2.deterministic)
        assert not np.array_equal(t1.stochastic, t2.stochastic)

    def test_mode_count_validated(self):
        grid = small_grid(n_x=40, n_t=256)
        src = reference_sources(grid)
        with pytest.raises(ValueError):
            solve_spectral(src, grid, zero_path(grid), 0)


class TestFinalTimeCoeffs:
    def test_pure_mode_field(self):
        grid = small_grid(n_x=48, n_t=192)
        from fracwave import WaveField, eigenpair

        phi2 = eigenpair(2, grid.spatial).values
        u = np.zeros((grid.n_t + 1, grid.spatial.n_x + 1))
        u[-1] = 1.7 * phi2
        coeffs = final_time_coeffs(WaveField(grid=grid, u=u), 4)
        assert coeffs[1] == pytest.approx(1.7, abs=1e-12)
        assert abs(coeffs[0]) < 1e-12 and abs(coeffs[2]) < 1e-12
