"""
Continuous-normalised inverse Fourier transform on centred grids.

:func:`ifft` replicates the continuous inverse transform of a spectral function sampled on a grid centred at the
origin: the transform is volume-normalised and the phases are those of the continuous integral, so samples of a
compactly supported spectral function go in and samples of its transform come out.

Arbitrary Fourier conventions are supported through the scheme of http://mathworld.wolfram.com/FourierTransform.html,
so the *n*-dimensional inverse transform is

.. math:: f(r) = \\sqrt{\\frac{|b|}{(2\\pi)^{1+a}}}^n \\int F(k) e^{+i b\\mathbf{k}\\cdot\\mathbf{r}} d^n \\mathbf{k}.

:mod:`eigenloc.herglotz` uses it with ``a = b = 1``, which is exactly
:math:`(2\\pi)^{-n}\\int g(\\xi)e^{ix\\cdot\\xi}d\\xi`.

Grids follow the ``numpy.fft`` centring: a side of ``N`` cells with spacing ``d`` has nodes ``(i - N//2) * d``.
The FFT backend is ``pyFFTW`` if it is installed, otherwise ``numpy.fft``.
"""
import warnings

__all__ = ['ifft', 'fftfreq', 'grid_coords']

try:
    from multiprocessing import cpu_count
    THREADS = cpu_count()

    from pyfftw.interfaces.numpy_fft import ifftn as _ifftn, ifftshift, fftshift

    def ifftn(*args, **kwargs):
        return _ifftn(threads=THREADS, *args, **kwargs)

    HAVE_FFTW = True

except ImportError:
    warnings.warn("You do not have pyFFTW installed. Installing it should give some speed increase.")
    HAVE_FFTW = False
    from numpy.fft import ifftn, ifftshift, fftshift

# numpy needs to be imported after pyfftw: see https://github.com/pyFFTW/pyFFTW/issues/40
import numpy as np


def grid_coords(N, d):
    "Centred node co-ordinates of a side with ``N`` cells of spacing ``d``."
    return (np.arange(N) - N // 2) * d


def _sides(X, L, axes):
    if axes is None:
        axes = list(range(X.ndim))
    N = np.array([X.shape[axis] for axis in axes])
    if np.isscalar(L):
        L = L * np.ones(len(axes))
    return axes, N, np.asarray(L, dtype=float)


def ifft(X, Lk, a=0, b=2 * np.pi, axes=None, ret_cubegrid=False):
    r"""
    Arbitrary-dimension continuous inverse Fourier transform of centred samples.

    Parameters
    ----------
    X : array
        Samples of the spectral function on a centred grid.

    Lk : float or array-like
        The side length(s) of the spectral box which defines ``X``.

    a,b : float, optional
        Fourier convention; see :mod:`eigenloc.dft`.

    axes : sequence of ints, optional
        The axes to take the transform over. The default is to use all axes.

    ret_cubegrid : bool, optional
        Whether to return the entire grid of real-space co-ordinate magnitudes.

    Returns
    -------
    ft : array
        Samples of the continuous inverse transform on the centred real-space grid.

    x : list of arrays
        The real-space co-ordinates along each transformed axis.

    grid : array
        Only returned if ``ret_cubegrid`` is ``True``.
    """
    axes, N, Lk = _sides(X, Lk, axes)
    dk = Lk / N

    # ifftn carries a 1/N^n which the continuous transform does not
    norm = np.sqrt(np.abs(b) / (2 * np.pi) ** (1 + a)) ** len(axes)
    ft = norm * float(np.prod(dk)) * N.prod() * fftshift(ifftn(ifftshift(X, axes=axes), axes=axes), axes=axes)
    freq = [fftfreq(n, d=d, b=b) for n, d in zip(N, dk)]
    if not ret_cubegrid:
        return ft, freq
    return ft, freq, _magnitude(freq)


def _magnitude(freq):
    grid = freq[0] ** 2
    for f in freq[1:]:
        grid = np.add.outer(grid, f ** 2)
    return np.sqrt(grid)


def fftfreq(N, d=1.0, b=2 * np.pi):
    """
    Return the centred dual co-ordinates for a side with ``N`` cells of spacing ``d``.

    Parameters
    ----------
    N : int
        The number of grid cells.

    d : float, optional
        The interval between cells.

    b : float, optional
        The Fourier convention of the frequency component (see :mod:`eigenloc.dft` for details).

    Returns
    -------
    freq : array
        The ``N`` dual co-ordinates, with the zero at index ``N//2``.
    """
    return grid_coords(N, 2 * np.pi / (b * N * d))
