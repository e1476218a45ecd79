import numpy as np
import os
import inspect
import sys

LOCATION = "/".join(os.path.dirname(os.path.abspath(inspect.getfile(inspect.currentframe()))).split("/")[:-1])
sys.path.insert(0, LOCATION)

from eigenloc.dft import ifft, fftfreq, grid_coords

# SETUP
N = 400
Lk = 40.
k = grid_coords(N, Lk / N)
KX, KY = np.meshgrid(k, k, indexing='ij')
gauss = np.exp(-(KX ** 2 + KY ** 2) / 2)


def test_non_unitary_angular():
    # (2 pi)^-n times the integral of g(xi) e^{i x.xi}, the convention of the Herglotz pipeline
    gx, xs, grid = ifft(gauss, Lk=Lk, a=1, b=1, ret_cubegrid=True)
    assert np.max(np.abs(gx - np.exp(-grid ** 2 / 2) / (2 * np.pi))) < 1e-10
    assert np.allclose(xs[0], grid_coords(N, 2 * np.pi / Lk))


def test_unitary_angular():
    gx, xs, grid = ifft(gauss, Lk=Lk, a=0, b=1, ret_cubegrid=True)
    assert np.max(np.abs(gx - np.exp(-grid ** 2 / 2))) < 1e-10


def test_unitary_ordinary():
    Lk = 10.
    k = grid_coords(N, Lk / N)
    F = np.exp(-np.pi * np.add.outer(k ** 2, k ** 2))
    fx, xs, grid = ifft(F, Lk=Lk, a=0, b=2 * np.pi, ret_cubegrid=True)
    assert np.max(np.abs(fx - np.exp(-np.pi * grid ** 2))) < 1e-10
    assert np.allclose(np.diff(xs[0]), 1 / Lk)


def test_shifted_phase_1d():
    r0 = 1.3
    g = np.exp(-k ** 2 / 2) * np.exp(-1j * k * r0)
    f, xs = ifft(g, Lk=Lk, a=1, b=1)
    assert np.max(np.abs(f - np.exp(-(xs[0] - r0) ** 2 / 2) / np.sqrt(2 * np.pi))) < 1e-10


def test_partial_axes():
    g = np.exp(-KX ** 2 / 2) * np.cos(KY)
    f, xs = ifft(g, Lk=Lk, a=1, b=1, axes=[0])
    assert len(xs) == 1
    expected = np.exp(-xs[0][:, None] ** 2 / 2) / np.sqrt(2 * np.pi) * np.cos(KY)
    assert np.max(np.abs(f - expected)) < 1e-10


def test_fftfreq_centred():
    f = fftfreq(8, d=0.5, b=1)
    assert f[4] == 0
    assert np.allclose(np.diff(f), 2 * np.pi / 4.)
