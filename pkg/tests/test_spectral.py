"""Tests for the sine eigenbasis and grid projections."""

import numpy as np
import pytest

from fracwave import (
    DOMAIN_LENGTH,
    EigenMode,
    SpatialGrid,
    eigenpair,
    max_mode,
    mode_matrix,
    project,
    projection_weights,
    synthesize,
    synthesize_rank2,
)


class TestGrid:
    def test_nodes_and_spacing(self):
        grid = SpatialGrid(4)
        assert grid.h_x == pytest.approx(np.pi / 4)
        assert np.allclose(grid.nodes, np.linspace(0.0, np.pi, 5))

    def test_rejects_tiny_grid(self):
        with pytest.raises(ValueError):
            SpatialGrid(1)

    def test_max_mode_quarter_rule(self):
        assert max_mode(SpatialGrid(100)) == 25
        assert max_mode(SpatialGrid(17)) == 4


class TestEigenpairs:
    @pytest.mark.parametrize("k", [1, 2, 7])
    def test_eigenvalue_and_shape(self, k):
        grid = SpatialGrid(64)
        mode = eigenpair(k, grid)
        assert isinstance(mode, EigenMode)
        assert mode.eigenvalue == pytest.approx(k**2)
        expect = np.sqrt(2.0 / DOMAIN_LENGTH) * np.sin(k * grid.nodes)
        assert np.allclose(mode.values, expect)

    def test_vanishes_on_boundary(self):
        grid = SpatialGrid(50)
        mode = eigenpair(3, grid)
        assert mode.values[0] == 0.0
        assert abs(mode.values[-1]) < 1e-12

    def test_mode_out_of_range(self):
        grid = SpatialGrid(20)
        with pytest.raises(ValueError):
            eigenpair(0, grid)
        with pytest.raises(ValueError):
            eigenpair(max_mode(grid) + 1, grid)

    def test_orthonormal_under_trapezoid(self):
        # trapezoid rule integrates these products exactly on a uniform grid
        grid = SpatialGrid(128)
        n = max_mode(grid)
        phi = mode_matrix(n, grid)
        w = np.full(grid.n_x + 1, grid.h_x)
        w[0] = w[-1] = grid.h_x / 2
        gram = (phi * w) @ phi.T
        assert np.abs(gram - np.eye(n)).max() < 1e-12


class TestProjection:
    def test_pure_mode_round_trip(self):
        grid = SpatialGrid(80)
        mode = eigenpair(5, grid)
        field = 2.5 * mode.values
        assert project(field, 5, grid) == pytest.approx(2.5, abs=1e-12)
        assert project(field, 3, grid) == pytest.approx(0.0, abs=1e-12)

    def test_weights_match_project(self):
        grid = SpatialGrid(60)
        n = 10
        rng = np.random.default_rng(0)
        field = np.sin(grid.nodes) * rng.uniform(0.5, 1.5)
        weights = projection_weights(n, grid)
        via_matrix = field @ weights
        via_loop = np.array([project(field, k, grid) for k in range(1, n + 1)])
        assert np.allclose(via_matrix, via_loop, atol=1e-14)

    def test_synthesize_round_trip(self):
        grid = SpatialGrid(96)
        coeffs = np.array([0.7, -0.3, 0.0, 0.1])
        field = synthesize(coeffs, grid)
        back = field @ projection_weights(4, grid)
        assert np.allclose(back, coeffs, atol=1e-12)

    def test_field_length_check(self):
        grid = SpatialGrid(30)
        with pytest.raises(ValueError):
            project(np.zeros(7), 1, grid)


class TestRankTwoSynthesis:
    def test_outer_product_squares_field(self):
        grid = SpatialGrid(64)
        coeffs = np.array([0.4, 0.0, -0.2])
        field = synthesize(coeffs, grid)
        quad = synthesize_rank2(np.outer(coeffs, coeffs), grid)
        assert np.allclose(quad, field**2, atol=1e-12)

    def test_requires_symmetry(self):
        grid = SpatialGrid(40)
        m = np.array([[1.0, 0.5], [0.0, 1.0]])
        with pytest.raises(ValueError):
            synthesize_rank2(m, grid)

    def test_requires_square(self):
        grid = SpatialGrid(40)
        with pytest.raises(ValueError):
            synthesize_rank2(np.ones((2, 3)), grid)

    def test_too_many_modes_rejected(self):
        grid = SpatialGrid(12)
        n = max_mode(grid) + 1
        with pytest.raises(ValueError):
            synthesize_rank2(np.eye(n), grid)
