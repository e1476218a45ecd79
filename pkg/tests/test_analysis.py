import numpy as np
import os
import inspect
import sys

import pytest

LOCATION = "/".join(os.path.dirname(os.path.abspath(inspect.getfile(inspect.currentframe()))).split("/")[:-1])
sys.path.insert(0, LOCATION)

from eigenloc.analysis import EvaluationGrid, GridTooCoarseError, fd_derivative, laplacian, interior_sup, \
    multi_indices, cr_error, radial_sum


def wave(p):
    return np.sin(p[:, 0]) * np.cos(p[:, 1])


def test_grid_size():
    grid = EvaluationGrid(3, 0.1)
    assert grid.N == 25
    assert grid.shape == (25, 25, 25)
    assert np.isclose(grid.boxlength, 2.4)
    assert grid.x[grid.N // 2] == 0
    assert grid.points.shape == (25 ** 3, 3)


def test_grid_mask():
    grid = EvaluationGrid(2, 0.25, radius=1.)
    assert grid.mask.sum() == np.sum(grid.r <= 1 + 1e-12)
    assert grid.mask[grid.N // 2, grid.N // 2]
    assert not grid.mask[0, 0]


def test_grid_too_coarse():
    with pytest.raises(GridTooCoarseError):
        EvaluationGrid(2, 2., radius=1., margin=0)
    with pytest.raises(ValueError):
        EvaluationGrid(2, -0.1)


def test_fill_adds_component_axis():
    grid = EvaluationGrid(2, 0.1)
    assert grid.fill(wave).shape == grid.shape + (1,)
    assert grid.fill(lambda p: np.stack([wave(p), wave(p)], axis=-1)).shape == grid.shape + (2,)


def test_fd_second_order():
    def error(h):
        grid = EvaluationGrid(2, h)
        v = grid.fill(wave)
        d = fd_derivative(v, (1, 0), h)
        p = grid.points.reshape(grid.shape + (2,))
        exact = (np.cos(p[..., 0]) * np.cos(p[..., 1]))[..., None]
        return interior_sup(d - exact, grid.mask)

    assert 3.5 < error(0.1) / error(0.05) < 4.5


def test_fd_edges_are_nan():
    grid = EvaluationGrid(2, 0.1)
    d = fd_derivative(grid.fill(wave), (2, 0), grid.h)
    assert np.all(np.isnan(d[0])) and np.all(np.isnan(d[-1]))
    assert not np.any(np.isnan(d[1:-1]))


def test_fd_order_limit():
    with pytest.raises(ValueError):
        fd_derivative(np.zeros((7, 7, 1)), (2, 1), 0.1)
    with pytest.raises(ValueError):
        fd_derivative(np.zeros((7, 7, 1)), (1,), 0.1)


def test_laplacian_of_plane_wave():
    grid = EvaluationGrid(3, 0.05)
    v = grid.fill(lambda p: np.exp(1j * p @ np.array([0.6, 0., 0.8])))
    residual = interior_sup(laplacian(v, grid.h) + v, grid.mask)
    assert residual < grid.h ** 2 / 10.


def test_multi_indices():
    assert multi_indices(2, 1) == [(0, 0), (1, 0), (0, 1)]
    assert len(multi_indices(3, 2)) == 10


def test_cr_error_zero_for_same_field():
    grid = EvaluationGrid(2, 0.1)
    assert cr_error(wave, wave, grid, r=2) == 0


def test_cr_error_of_constant_shift():
    grid = EvaluationGrid(2, 0.1)

    def shifted(p):
        return wave(p) + 0.3 * p[:, 0]

    assert np.isclose(cr_error(wave, shifted, grid, r=0), 0.3, atol=1e-12)
    assert np.isclose(cr_error(wave, shifted, grid, r=1), 0.3, atol=1e-12)


def test_cr_error_needs_margin():
    with pytest.raises(GridTooCoarseError):
        cr_error(wave, wave, EvaluationGrid(2, 0.1, margin=0), r=1)
    with pytest.raises(ValueError):
        cr_error(wave, wave, EvaluationGrid(2, 0.1), r=3)


def test_radial_sum_counts():
    x = np.arange(-10, 11) * 0.1
    ones = np.ones((21, 21))
    sums, centres = radial_sum(ones, [x, x], bins=[0, 0.55, 1.05])
    assert sums[0] == np.sum(np.add.outer(x ** 2, x ** 2) < 0.55 ** 2)
    assert len(centres) == 2


def test_radial_sum_average():
    x = np.arange(-10, 11) * 0.1
    X, Y = np.meshgrid(x, x, indexing='ij')
    field = 2 + 1j * np.ones_like(X)
    avg, _ = radial_sum(field, [x, x], bins=4, average=True)
    assert np.allclose(avg, 2 + 1j)
