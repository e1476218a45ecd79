import itertools
import numpy as np
import os
import inspect
import sys

import pytest

LOCATION = "/".join(os.path.dirname(os.path.abspath(inspect.getfile(inspect.currentframe()))).split("/")[:-1])
sys.path.insert(0, LOCATION)

from eigenloc.herglotz import build_cap_cover
from eigenloc.torus import LatticeSphere, TorusEigenfunction, FlatChart, EmptyCellError, enumerate_lattice, \
    assign_caps, hermitian_symmetrize, synthesize_torus, eval_torus, admissible_degrees, first_admissible, \
    search_torus2, cap_statistics, _isqrt
from eigenloc.waves import BesselSum

# SETUP
rng = np.random.RandomState(11)
TARGET = BesselSum([1., -0.6], [[0.8, 0., 0.], [0., -0.5, 1.2]])
DENSITY = TARGET.to_herglotz()
COVER = build_cap_cover(3, 0.7)
N_ADMISSIBLE = first_admissible(COVER, range(1, 501, 2))


class ConstantDensity(object):
    real = True

    def __init__(self, n):
        self.n = n

    def density(self, xi):
        return np.ones((len(xi), 1))


class WholeSphere(object):
    "A one-cell cover of S^2 whose representative point is (3, 4, 0)/5."
    n = 3
    areas = np.array([4 * np.pi])

    def __len__(self):
        return 1

    def locate(self, xi):
        return np.zeros(len(np.atleast_2d(xi)), dtype=int)

    def points(self, choice="center"):
        return np.array([[0.6, 0.8, 0.]])


def brute_force(N, n):
    return sorted(k for k in itertools.product(range(-N, N + 1), repeat=n) if sum(i * i for i in k) == N * N)


def test_small_lattices():
    assert len(enumerate_lattice(3, 3)) == 30
    assert len(enumerate_lattice(5, 2)) == 12
    assert len(enumerate_lattice(65, 2)) == 36


@pytest.mark.parametrize("N,n", [(5, 2), (7, 3), (6, 3), (4, 4), (5, 4)])
def test_lattice_brute_force(N, n):
    lattice = enumerate_lattice(N, n)
    assert [tuple(k) for k in lattice.points.tolist()] == brute_force(N, n)
    assert lattice.symmetric


def test_isqrt_exact():
    big = 10 ** 9
    v = np.array([big ** 2 - 1, big ** 2, big ** 2 + 1, 0, 1, 2], dtype=np.int64)
    assert _isqrt(v).tolist() == [big - 1, big, big, 0, 1, 1]


def test_lattice_limits():
    with pytest.raises(ValueError):
        enumerate_lattice(3, 5)
    with pytest.raises(ValueError):
        enumerate_lattice(0, 3)
    with pytest.raises(ValueError):
        enumerate_lattice(2001, 3)
    with pytest.raises(ValueError):
        LatticeSphere(3, 2, [[1, 1]])


def test_directions_are_unit():
    lattice = enumerate_lattice(25, 3)
    assert np.allclose(np.linalg.norm(lattice.directions, axis=1), 1)


def test_admissible_degree_found():
    assert N_ADMISSIBLE is not None
    assert N_ADMISSIBLE % 2 == 1
    assert N_ADMISSIBLE in admissible_degrees(COVER, (N_ADMISSIBLE, N_ADMISSIBLE))


def test_assignment_snaps_to_centre():
    lattice = enumerate_lattice(N_ADMISSIBLE, 3)
    assignment = assign_caps(COVER, lattice)
    assert assignment.complete
    cells = COVER.locate(lattice.directions)
    centres = COVER.centers
    for cell, direction in assignment.pairs():
        candidates = lattice.directions[cells == cell]
        assert np.isclose(direction @ centres[cell], np.max(candidates @ centres[cell]))
        assert COVER.locate(direction)[0] == cell


def test_empty_cells():
    cover = build_cap_cover(3, 0.3)
    with pytest.raises(EmptyCellError) as err:
        assign_caps(cover, enumerate_lattice(3, 3))
    assert len(err.value.assignment.empty_cells) > 0
    partial = assign_caps(cover, enumerate_lattice(3, 3), partial=True)
    assert not partial.complete
    assert len(partial.vectors) == len(cover) - len(partial.empty_cells)


def test_assignment_dimension_check():
    with pytest.raises(ValueError):
        assign_caps(build_cap_cover(2, 0.5), enumerate_lattice(5, 3))


def test_rescaled_equals_plane_wave_sum():
    psi = synthesize_torus(DENSITY, COVER, N_ADMISSIBLE)
    x = rng.uniform(-3, 3, (100, 3))
    assert np.max(np.abs(psi.rescaled()(x) - psi.plane_wave_sum()(x))) < 1e-12


def test_torus_realness():
    psi = synthesize_torus(DENSITY, COVER, N_ADMISSIBLE)
    assert psi.real and psi.hermitian
    x = rng.uniform(0, 2 * np.pi, (200, 3))
    assert np.max(np.abs(psi(x).imag)) <= 1e-12


def test_torus_eigenvalue():
    psi = synthesize_torus(DENSITY, COVER, N_ADMISSIBLE)
    x = rng.uniform(0, 2 * np.pi, (20, 3))
    assert psi.eigenvalue == N_ADMISSIBLE ** 2
    assert np.allclose(psi.laplacian(x), -psi.eigenvalue * psi(x))


def test_unsymmetrized_keeps_complex_modes():
    psi = synthesize_torus(DENSITY, COVER, N_ADMISSIBLE, symmetrize=False)
    assert not psi.real
    assert len(psi) == len(COVER)


@pytest.mark.slow
def test_localization_error_decreases():
    x = rng.uniform(-1, 1, (80, 3)) / np.sqrt(3)
    exact = TARGET(x)

    def error(eps, start):
        cover = build_cap_cover(3, eps)
        N = first_admissible(cover, range(start, 2000, 2))
        return np.max(np.abs(synthesize_torus(DENSITY, cover, N).rescaled()(x) - exact))

    ratio = error(0.6, 251) / error(0.3, 1001)
    assert 1.5 <= ratio <= 2.5


def test_even_degrees():
    cover = build_cap_cover(3, 3.)
    with pytest.raises(ValueError):
        synthesize_torus(DENSITY, cover, 4)
    psi = synthesize_torus(DENSITY, cover, 4, allow_even=True)
    assert len(enumerate_lattice(4, 3)) == len(cover) == 6
    assert psi.eigenvalue == 16


def test_even_degree_warns_in_four_dimensions():
    with pytest.warns(UserWarning):
        try:
            synthesize_torus(ConstantDensity(4), build_cap_cover(4, 3.), 2)
        except EmptyCellError:
            pass


def test_density_dimension_check():
    with pytest.raises(ValueError):
        synthesize_torus(ConstantDensity(2), COVER, 5)


def test_eigenfunction_validation():
    with pytest.raises(ValueError):
        TorusEigenfunction(5, 2, [[3, 3]], [1.])
    with pytest.raises(ValueError):
        TorusEigenfunction(5, 2, [[3, 4]], [1.], real=True)
    with pytest.raises(ValueError):
        eval_torus(TorusEigenfunction(5, 2, [[3, 4]], [1.]), np.zeros((1, 3)))


def test_hermitian_symmetrize():
    vectors, coefficients = hermitian_symmetrize([[1, 0], [-1, 0]], [1., 2j])
    assert vectors.tolist() == [[-1, 0], [1, 0]]
    assert np.allclose(coefficients[:, 0], [0.5 + 1j, 0.5 - 1j])
    assert TorusEigenfunction(1, 2, vectors, coefficients, real=True).hermitian


def test_hermitian_symmetrize_adds_missing_partner():
    vectors, coefficients = hermitian_symmetrize([[3, 4, 0]], [1 + 2j])
    assert vectors.tolist() == [[-3, -4, 0], [3, 4, 0]]
    assert np.allclose(coefficients[:, 0], [1 - 2j, 1 + 2j])


def test_single_cell_cover():
    psi = synthesize_torus(ConstantDensity(3), WholeSphere(), 5)
    c = 4 * np.pi
    assert psi.real and len(psi) == 2
    assert psi.vectors.tolist() == [[-3, -4, 0], [3, 4, 0]]
    x = rng.uniform(0, 2 * np.pi, (20, 3))
    expected = 2 * np.real(c * np.exp(1j * (3 * x[:, 0] + 4 * x[:, 1])))
    assert np.allclose(psi(x)[:, 0], expected, rtol=0, atol=1e-12)


def test_flat_chart():
    chart = FlatChart(2)
    p = chart([[-0.5, 7.]])
    assert np.all((p >= 0) & (p < 2 * np.pi))
    assert np.allclose(chart.inverse(p), [[-0.5, 7. - 2 * np.pi]])


def test_cap_statistics():
    lattice = enumerate_lattice(N_ADMISSIBLE, 3)
    counts, expected = cap_statistics(COVER, lattice)
    assert counts.sum() == len(lattice)
    assert np.isclose(expected.sum(), len(lattice))
    assert np.all(counts > 0)


def test_search_torus2_needs_circle():
    with pytest.raises(ValueError):
        search_torus2((1, 11), COVER)


def test_search_torus2_small():
    cover = build_cap_cover(2, 1.)
    found = search_torus2((1, 101), cover)
    assert 1 not in found and 3 not in found
    assert 5 in found and 65 in found
    assert found == search_torus2(list(range(1, 102)), cover)


@pytest.mark.slow
def test_search_torus2_obstruction():
    cover = build_cap_cover(2, 0.1)
    odd = list(range(1, 1001, 2))
    found = search_torus2(odd, cover)
    assert len(found) < len(odd)
    assert all(N % 2 == 1 for N in found)
    assert found == search_torus2(odd, cover)
