import numpy as np
import os
import inspect
import sys

import pytest
from scipy import integrate

LOCATION = "/".join(os.path.dirname(os.path.abspath(inspect.getfile(inspect.currentframe()))).split("/")[:-1])
sys.path.insert(0, LOCATION)

from eigenloc import specfun
from eigenloc.herglotz import SphericalCapCover, BallCellCover, BumpProfile, FourierSamples, CoverSizeError, \
    TailBoundError, MAX_TAIL_POINTS, build_cap_cover, discretize_density, discretize_fourier, extend_and_transform, \
    approximate_bessel
from eigenloc.waves import BesselSum

# SETUP
rng = np.random.RandomState(7)


def ball_points(count, n, radius=1.):
    v = rng.standard_normal((count, n))
    pts = radius * rng.uniform(0, 1, (count, 1)) * v / np.linalg.norm(v, axis=1)[:, None]
    axis = np.zeros((1, n))
    axis[0, -1] = radius
    return np.concatenate([pts, axis])


def origin_kernel(n):
    return BesselSum([1.], np.zeros((1, n)))


@pytest.mark.parametrize("n,eps", [(2, 0.5), (3, 0.5), (3, 0.2), (4, 0.6)])
def test_cover_area(n, eps):
    cover = build_cap_cover(n, eps)
    assert np.isclose(cover.total_area, specfun.sphere_area(n), rtol=1e-12)
    assert np.all(cover.areas > 0)


@pytest.mark.parametrize("n,eps", [(2, 0.5), (3, 0.3), (4, 0.6)])
def test_cover_diameters(n, eps):
    cover = build_cap_cover(n, eps)
    assert cover.diameters.max() <= eps + 1e-12


@pytest.mark.parametrize("n,eps", [(2, 0.5), (3, 0.3), (4, 0.8)])
def test_centres_in_their_cells(n, eps):
    cover = build_cap_cover(n, eps)
    assert np.all(cover.locate(cover.centers) == np.arange(len(cover)))


def test_locate_random_points_in_some_cell():
    cover = build_cap_cover(3, 0.4)
    xi = specfun.from_angles(np.column_stack([rng.uniform(0, np.pi, 200), rng.uniform(0, 2 * np.pi, 200)]))
    assert np.all(cover.locate(xi) >= 0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_antipodal_symmetry(n):
    assert build_cap_cover(n, 0.7).antipodal_symmetric


def test_even_circle_count():
    cover = build_cap_cover(2, 2 * np.pi / 7.)
    assert len(cover) == 8


def test_cover_size_cap():
    with pytest.raises(CoverSizeError):
        build_cap_cover(3, 0.001, max_cells=1000)


def test_cover_bad_input():
    with pytest.raises(ValueError):
        SphericalCapCover(1, 0.1)
    with pytest.raises(ValueError):
        SphericalCapCover(3, 0.)
    with pytest.raises(ValueError):
        build_cap_cover(3, 0.5).points("random")


@pytest.mark.parametrize("n", [2, 3])
def test_ball_cover(n):
    cover = BallCellCover(n, 2.5, 0.4)
    assert np.isclose(cover.total_volume, specfun.sphere_area(n) / n * 2.5 ** n, rtol=1e-12)
    assert cover.diameters.max() <= 0.4 + 1e-12
    assert np.all(np.linalg.norm(cover.points("corner"), axis=1) <= 2.5)


def test_bump_values():
    bump = BumpProfile()
    assert bump(1.) == 1
    assert bump(1.2) == 1
    assert bump(0.8) == 1
    assert bump(0.4) == 0
    assert bump(1.6) == 0
    assert np.isclose(bump(1.375), 0.5)
    assert np.isclose(bump(0.625), 0.5)
    s = np.linspace(0.5, 0.75, 50)
    assert np.all(np.diff(bump(s)) >= 0)


def test_bump_bad_parameters():
    with pytest.raises(ValueError):
        BumpProfile(0.5, 0.25)


def test_discretize_density_dimension_check():
    with pytest.raises(ValueError):
        discretize_density(origin_kernel(3).to_herglotz(), build_cap_cover(2, 0.5))


def test_discretize_density_linear_rate():
    # corner points make the error first order in the cell diameter
    target = origin_kernel(3)
    f = target.to_herglotz()
    x = ball_points(60, 3)
    exact = target(x)

    def error(eps, choice):
        return np.max(np.abs(discretize_density(f, build_cap_cover(3, eps), choice)(x) - exact))

    coarse = error(2 * np.pi / 16, "corner")
    fine = error(2 * np.pi / 32, "corner")
    assert 1.5 <= coarse / fine <= 2.5
    assert error(2 * np.pi / 16, "center") < coarse


class GaussianSamples(object):
    n = 2
    real = True

    def __call__(self, x):
        return np.exp(-np.sum(x ** 2, axis=1))[:, None]


def test_discretize_fourier_linear_rate():
    samples = GaussianSamples()
    x = ball_points(40, 2)
    fine = discretize_fourier(samples, 3., 0.05)(x)

    def error(delta2):
        return np.max(np.abs(discretize_fourier(samples, 3., delta2, choice="corner")(x) - fine))

    assert 1.5 <= error(0.4) / error(0.2) <= 2.5


def test_fourier_samples_at_origin():
    # g-hat(0) is (2 pi)^-n times the integral of g
    n = 3
    samples = FourierSamples(origin_kernel(n).to_herglotz())
    bump = samples.bump
    radial = integrate.quad(lambda s: bump(s) * s ** (n - 1), 0.5, 1.5, points=[0.75, 1.25], epsabs=1e-13)[0]
    expected = (2 * np.pi) ** (-n) * radial * specfun.sphere_area(n) * (2 * np.pi) ** (-n / 2.)
    assert np.isclose(samples(np.zeros(n))[0, 0].real, expected, rtol=1e-7)


def test_fourier_samples_match_fft():
    samples = FourierSamples(BesselSum([1., 0.5], [[0.3, 0.], [0., -0.4]]).to_herglotz())
    values, x = samples.on_grid(32.)
    i0 = len(x[0]) // 2
    sl = slice(i0 - 4, i0 + 5)
    X, Y = np.meshgrid(x[0][sl], x[1][sl], indexing='ij')
    direct = samples(np.column_stack([X.ravel(), Y.ravel()]))[:, 0].reshape(X.shape)
    scale = np.abs(direct).max()
    assert np.max(np.abs(values[sl, sl, 0] - direct)) < 1e-2 * scale


def test_extension_vanishes_off_annulus():
    samples = FourierSamples(origin_kernel(2).to_herglotz())
    g = samples.extension([[0.2, 0.], [1., 0.], [0., 1.6]])
    assert g[0, 0] == 0 and g[2, 0] == 0
    assert np.isclose(g[1, 0], (2 * np.pi) ** -1.)


def test_tail_profile_decreasing():
    samples = FourierSamples(origin_kernel(2).to_herglotz())
    tails = samples.tail_profile([2., 4., 8.], extent=24.)
    assert np.all(np.diff(tails) <= 0)
    assert tails[0] > 0


@pytest.mark.parametrize("n,extent", [(2, 600.), (3, 48.), (3, 150.)])
def test_tail_grid_is_capped(n, extent):
    samples = FourierSamples(origin_kernel(n).to_herglotz())
    step = samples.tail_step(extent)
    assert step > 0.25
    assert (2 * np.ceil(extent / step)) ** n <= MAX_TAIL_POINTS
    assert np.pi / step >= samples.bump.support[1]


def test_tail_step_unchanged_on_small_grids():
    samples = FourierSamples(origin_kernel(3).to_herglotz())
    assert samples.tail_step(8.) == 0.25


def test_tail_bound():
    with pytest.raises(TailBoundError):
        extend_and_transform(origin_kernel(2).to_herglotz(), R=1., tail_tol=1e-12)


def test_pipeline_dimension_check():
    with pytest.raises(ValueError):
        extend_and_transform(type("D", (), {"n": 4})())


@pytest.mark.slow
def test_approximate_bessel():
    target = BesselSum([1.], [[0.3, 0.]])
    bessel, report = approximate_bessel(target, 12., 0.15, L=8)
    x = ball_points(80, 2)
    exact = target(x)
    assert np.max(np.abs(bessel(x) - exact)) < 0.1 * np.abs(exact).max()
    assert report["terms"] == len(bessel)
    assert report["truncation_error"] < 1e-8
    assert bessel.real
