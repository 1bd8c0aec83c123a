"""Shared builders for the test suite."""

import warnings

import numpy as np
import pytest

from fracwave import SourceSpec, SpaceTimeGrid, SpatialGrid


def reference_sources(grid: SpaceTimeGrid) -> SourceSpec:
    """f = sin(3x), g = exp(-(x - pi/2)^2), h = 1 on the given grid.

    g does not vanish at the walls, which SourceSpec warns about by
    design; the warning is silenced here so tests that are not about it
    stay quiet.
    """
    x = grid.spatial.nodes
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return SourceSpec(
            f_samples=np.sin(3.0 * x),
            g_samples=np.exp(-((x - np.pi / 2.0) ** 2)),
            h_samples=np.ones(grid.n_t + 1),
        )


def small_grid(n_x: int = 60, n_t: int = 512, t_final: float = 1.0) -> SpaceTimeGrid:
    return SpaceTimeGrid(spatial=SpatialGrid(n_x), n_t=n_t, t_final=t_final)


@pytest.fixture(scope="session")
def reference_grid() -> SpaceTimeGrid:
    """The reference resolution: n_x=100, n_t=2^13, T=1."""
    return SpaceTimeGrid(spatial=SpatialGrid(100), n_t=2**13, t_final=1.0)


@pytest.fixture(scope="session")
def reference_grid_sources(reference_grid) -> SourceSpec:
    return reference_sources(reference_grid)
