import numpy as np
import os
import inspect
import sys

import pytest

LOCATION = "/".join(os.path.dirname(os.path.abspath(inspect.getfile(inspect.currentframe()))).split("/")[:-1])
sys.path.insert(0, LOCATION)

from eigenloc import specfun
from eigenloc.analysis import EvaluationGrid
from eigenloc.waves import BesselSum, PlaneWaveSum, HerglotzDensity, HarmonicExpansion, QuadratureError, \
    IllConditionedFitError, eval_wave, helmholtz_residual, expand_wave, expansion_to_density, plane_wave_expansion

# SETUP
rng = np.random.RandomState(42)


def random_points(count, n, radius):
    v = rng.standard_normal((count, n))
    return radius * rng.uniform(0, 1, (count, 1)) * v / np.linalg.norm(v, axis=1)[:, None]


def two_term(n):
    centers = np.zeros((2, n))
    centers[0, 0], centers[1, -1] = 0.8, -1.2
    return BesselSum([1., -0.6], centers)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_single_kernel(n):
    x = random_points(50, n, 3.)
    bs = BesselSum([1.], np.zeros((1, n)))
    assert np.allclose(bs(x)[:, 0], specfun.bessel_kernel(n, np.linalg.norm(x, axis=1)), atol=1e-15)


def test_eval_wave_shape():
    bs = BesselSum(np.ones((2, 2)), [[0., 0., 0.], [0., 0., 1.]])
    out = eval_wave(bs, np.zeros(3))
    assert out.shape == (1, 2)
    assert bs.m == 2 and bs.real


def test_bessel_radius_check():
    with pytest.raises(ValueError):
        BesselSum([1.], [[2., 0.]], radius=1.)


def test_plane_wave_directions_must_be_unit():
    with pytest.raises(ValueError):
        PlaneWaveSum([1.], [[1., 1.]])


@pytest.mark.parametrize("n", [2, 3])
def test_bessel_sum_density(n):
    bs = two_term(n)
    f = bs.to_herglotz()
    assert f.real
    x = random_points(40, n, 3.)
    assert np.max(np.abs(f(x) - bs(x))) < 1e-10


def test_hermitian_is_real_part():
    directions = specfun.from_angles(rng.uniform(0, np.pi, (5, 2)))
    pws = PlaneWaveSum(rng.standard_normal(5) + 1j * rng.standard_normal(5), directions)
    x = random_points(30, 3, 2.)
    assert np.allclose(pws.hermitian()(x), pws(x).real, atol=1e-13)
    assert len(pws.hermitian()) == 10


@pytest.mark.parametrize("n", [2, 3])
def test_expand_plane_wave(n):
    direction = np.zeros(n)
    direction[0], direction[-1] = 0.6, 0.8
    exact = plane_wave_expansion(direction, 6)
    fitted = expand_wave(PlaneWaveSum([1.], [direction]), n, 6)
    assert np.max(np.abs(fitted.coefficients - exact.coefficients)) < 1e-9


def test_truncation_error_decreases():
    pw = PlaneWaveSum([1.], [[0., 0., 1.]])
    coarse = expand_wave(pw, 3, 4)
    fine = expand_wave(pw, 3, 10)
    assert fine.truncation_error < coarse.truncation_error
    assert fine.truncation_error < 1e-4


def test_plane_wave_expansion_evaluates():
    xi0 = np.array([0., 1., 0.])
    x = random_points(30, 3, 1.)
    expansion = plane_wave_expansion(xi0, 15)
    assert np.max(np.abs(expansion(x)[:, 0] - np.exp(1j * x @ xi0))) < 1e-10


@pytest.mark.parametrize("n", [2, 3])
def test_expansion_density_reproduces(n):
    expansion = expand_wave(two_term(n), n, 10)
    density = expansion_to_density(expansion)
    assert density.real
    x = random_points(40, n, 1.)
    assert np.max(np.abs(density(x) - expansion(x))) < 1e-10


def test_from_samples_roundtrip():
    f = two_term(3).to_herglotz()
    nodes, values = f.samples(20)
    g = HerglotzDensity.from_samples(3, 20, values, real=True)
    xi = specfun.from_angles(np.column_stack([rng.uniform(0, np.pi, 25), rng.uniform(0, 2 * np.pi, 25)]))
    assert np.max(np.abs(g.density(xi) - f.density(xi))) < 1e-10


def test_forced_degree_too_small():
    f = HerglotzDensity(lambda xi: np.ones(len(xi)), 3, degree=2)
    with pytest.raises(QuadratureError):
        f(np.array([[10., 0., 0.]]))


def test_ill_conditioned_fit():
    with pytest.raises(IllConditionedFitError):
        expand_wave(two_term(3), 3, 0, radius=2 * np.pi, n_radii=1)


def test_harmonic_expansion_dimension():
    with pytest.raises(ValueError):
        HarmonicExpansion(4, 2, np.zeros(10))


def test_helmholtz_residual_second_order():
    bs = two_term(3)
    coarse, h2_coarse = helmholtz_residual(bs, EvaluationGrid(3, 0.1))
    fine, h2_fine = helmholtz_residual(bs, EvaluationGrid(3, 0.05))
    assert coarse < h2_coarse
    assert 3 < coarse / fine < 5


def test_helmholtz_residual_detects_non_waves():
    residual, _ = helmholtz_residual(lambda x: np.sum(x ** 2, axis=1), EvaluationGrid(2, 0.1))
    assert residual > 1
