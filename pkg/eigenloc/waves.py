"""
Monochromatic waves, i.e. solutions of :math:`\\Delta\\phi + \\phi = 0` in :math:`\\mathbb{R}^n`.

A wave is vector valued (``m`` components) and can be given in four interchangeable representations, each a
callable class evaluating the wave at an array of points of shape ``(P, n)`` and returning a complex array of
shape ``(P, m)``:

* :class:`BesselSum` -- :math:`\\sum_j c_j J_{n/2-1}(|x-x_j|)/|x-x_j|^{n/2-1}`;
* :class:`PlaneWaveSum` -- :math:`\\sum_k c_k e^{i\\xi_k\\cdot x}` with unit :math:`\\xi_k`;
* :class:`HerglotzDensity` -- :math:`\\int_{S^{n-1}} f(\\xi)e^{ix\\cdot\\xi}d\\sigma(\\xi)`;
* :class:`HarmonicExpansion` -- :math:`\\sum_{l\\le L}\\sum_k b_{lk}j_l(r)Y_{lk}(\\omega)` (``n`` in {2, 3}).

The representations are linked by the identity
:math:`\\int_{S^{n-1}}e^{ix\\cdot\\xi}d\\sigma = (2\\pi)^{n/2}J_{n/2-1}(|x|)/|x|^{n/2-1}` and its harmonic
counterpart (see :mod:`eigenloc.specfun`). A density with :math:`f(\\xi) = \\overline{f(-\\xi)}` gives a real wave.
"""
import logging

import numpy as np

from . import specfun

logger = logging.getLogger(__name__)

__all__ = ['BesselSum', 'PlaneWaveSum', 'HerglotzDensity', 'HarmonicExpansion', 'QuadratureError',
           'IllConditionedFitError', 'eval_wave', 'helmholtz_residual', 'expand_wave', 'expansion_to_density',
           'plane_wave_expansion']

# Points per block when forming (points x terms) matrices.
CHUNK = 4096


class QuadratureError(ArithmeticError):
    "The sphere quadrature cannot reach the requested accuracy."


class IllConditionedFitError(ArithmeticError):
    "The radial least-squares fit of a harmonic coefficient is ill-conditioned."


def _as_points(x, n):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[-1] != n:
        raise ValueError("points must have trailing dimension n=%s, got shape %s" % (n, x.shape))
    return x


def _as_coefficients(c, count):
    c = np.asarray(c)
    if c.ndim == 1:
        c = c[:, None]
    if c.shape[0] != count:
        raise ValueError("expected %s coefficient rows, got %s" % (count, c.shape[0]))
    return c


def _blocks(P):
    for start in range(0, P, CHUNK):
        yield slice(start, min(start + CHUNK, P))


class Wave(object):
    """
    Base class of all wave representations.

    Subclasses set ``kind``, ``n`` (dimension) and ``m`` (number of components) and implement :meth:`_evaluate`.
    """
    kind = None

    def __call__(self, x):
        x = _as_points(x, self.n)
        out = np.empty((x.shape[0], self.m), dtype=complex)
        for s in _blocks(x.shape[0]):
            out[s] = self._evaluate(x[s])
        return out

    def _evaluate(self, x):
        raise NotImplementedError


class BesselSum(Wave):
    r"""
    A finite sum of shifted Bessel kernels.

    Parameters
    ----------
    coefficients : array
        Shape ``(J, m)`` (or ``(J,)`` for scalar waves); real coefficients give a real wave.

    centers : array
        Shape ``(J, n)``, the shift points :math:`x_j`.

    radius : float, optional
        A radius :math:`R` with :math:`|x_j|\le R` for all ``j``. Defaults to the largest :math:`|x_j|`.

    n : int, optional
        Dimension; only needed when the sum is empty.
    """
    kind = "bessel_sum"

    def __init__(self, coefficients, centers, radius=None, n=None):
        centers = np.asarray(centers, dtype=float)
        if centers.size == 0:
            if n is None:
                raise ValueError("an empty BesselSum needs n")
            centers = centers.reshape(0, n)
        self.centers = centers
        self.n = centers.shape[1]
        coefficients = np.asarray(coefficients)
        if coefficients.size == 0:
            coefficients = coefficients.reshape(0, 1 if coefficients.ndim < 2 else coefficients.shape[1])
        self.coefficients = _as_coefficients(coefficients, len(centers))
        self.m = self.coefficients.shape[1]

        norms = np.linalg.norm(self.centers, axis=1) if len(self.centers) else np.zeros(0)
        self.radius = float(norms.max()) if radius is None and len(norms) else float(radius or 0.)
        if np.any(norms > self.radius * (1 + 1e-12) + 1e-12):
            raise ValueError("all centers must satisfy |x_j| <= radius")

    def __len__(self):
        return len(self.centers)

    @property
    def real(self):
        "Whether the coefficients (and hence the wave) are real."
        return bool(np.all(np.imag(self.coefficients) == 0))

    def _evaluate(self, x):
        if len(self) == 0:
            return np.zeros((x.shape[0], self.m), dtype=complex)
        dist = np.linalg.norm(x[:, None, :] - self.centers[None, :, :], axis=-1)
        return specfun.bessel_kernel(self.n, dist) @ self.coefficients

    def density(self, xi):
        r"""
        The Herglotz density :math:`(2\pi)^{-n/2}\sum_j c_j e^{-ix_j\cdot\xi}` of the sum, at unit vectors ``xi``.
        """
        xi = _as_points(xi, self.n)
        phase = np.exp(-1j * xi @ self.centers.T)
        return (2 * np.pi) ** (-self.n / 2.) * phase @ self.coefficients

    def to_herglotz(self, bandwidth=None):
        "The :class:`HerglotzDensity` representing the same wave."
        if bandwidth is None:
            bandwidth = int(np.ceil(np.e * self.radius / 2.)) + 16
        return HerglotzDensity(self.density, self.n, m=self.m, real=self.real, bandwidth=bandwidth)


class PlaneWaveSum(Wave):
    """
    A finite sum of plane waves :math:`\\sum_k c_k e^{i\\xi_k\\cdot x}`.

    Parameters
    ----------
    coefficients : array
        Shape ``(K, m)`` (or ``(K,)``), complex.

    directions : array
        Shape ``(K, n)``; unit vectors.
    """
    kind = "plane_wave_sum"

    def __init__(self, coefficients, directions, n=None):
        directions = np.asarray(directions, dtype=float)
        if directions.size == 0:
            if n is None:
                raise ValueError("an empty PlaneWaveSum needs n")
            directions = directions.reshape(0, n)
        if len(directions) and np.any(np.abs(np.linalg.norm(directions, axis=1) - 1) > 1e-10):
            raise ValueError("plane-wave directions must be unit vectors")
        self.directions = directions
        self.n = directions.shape[1]
        coefficients = np.asarray(coefficients, dtype=complex)
        if coefficients.size == 0:
            coefficients = coefficients.reshape(0, 1 if coefficients.ndim < 2 else coefficients.shape[1])
        self.coefficients = _as_coefficients(coefficients, len(directions))
        self.m = self.coefficients.shape[1]

    def __len__(self):
        return len(self.directions)

    def _evaluate(self, x):
        return np.exp(1j * x @ self.directions.T) @ self.coefficients

    def hermitian(self):
        """
        Hermitian symmetrization: each mode is split into itself and its mirrored conjugate at half weight.

        The resulting sum is exactly the real part of this one.
        """
        return PlaneWaveSum(np.concatenate([self.coefficients / 2., np.conj(self.coefficients) / 2.]),
                            np.concatenate([self.directions, -self.directions]), n=self.n)


def _wave_bandwidth(r, tol):
    "Smallest degree beyond which the Jacobi--Anger tail of e^{ir cos} drops under ``tol``."
    l = int(np.ceil(np.e * r / 2.)) + 1
    while l * np.log(np.e * max(r, 1e-300) / (2. * l)) > np.log(tol):
        l += 1
    return l


class HerglotzDensity(Wave):
    r"""
    A wave given by its Herglotz density on :math:`S^{n-1}`, evaluated by sphere quadrature (``n`` in {2, 3}).

    Parameters
    ----------
    func : callable
        Maps unit vectors of shape ``(P, n)`` to density values of shape ``(P, m)`` (or ``(P,)``).

    n : int
        Dimension.

    m : int, optional
        Number of components.

    real : bool, optional
        Whether :math:`f(\xi) = \overline{f(-\xi)}` holds, so that the wave is real.

    bandwidth : int, optional
        Harmonic degree beyond which ``f`` is negligible. Used to pick quadrature degrees; 16 if not given.

    degree : int, optional
        Force a quadrature degree. If it is too small for the requested tolerance at the points evaluated, a
        :class:`QuadratureError` is raised.

    tol : float, optional
        Target quadrature accuracy.
    """
    kind = "herglotz_grid"

    def __init__(self, func, n, m=1, real=False, bandwidth=None, degree=None, tol=1e-12):
        if n not in (2, 3):
            raise ValueError("Herglotz quadrature is only provided for n in {2, 3}")
        self.func = func
        self.n = n
        self.m = m
        self.real = real
        self.bandwidth = 16 if bandwidth is None else int(bandwidth)
        self.degree = degree
        self.tol = tol
        self._rules = {}

    @classmethod
    def from_samples(cls, n, degree, values, real=False):
        """
        A band-limited density reconstructed from its samples at the nodes of ``sphere_quadrature(n, degree)``.

        The samples are projected onto the harmonics of degree ``<= degree``.
        """
        nodes, weights = specfun.sphere_quadrature(n, degree)
        values = np.asarray(values)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != len(nodes):
            raise ValueError("expected %s samples for degree %s, got %s" % (len(nodes), degree, values.shape[0]))
        basis = specfun.harmonic_basis(n, degree, nodes)
        coeffs = basis.T @ (weights[:, None] * values)

        def func(xi):
            return specfun.harmonic_basis(n, degree, np.atleast_2d(xi)) @ coeffs

        return cls(func, n, m=values.shape[1], real=real, bandwidth=degree)

    def density(self, xi):
        "Density values at unit vectors ``xi``, shape ``(P, m)``."
        xi = _as_points(xi, self.n)
        f = np.asarray(self.func(xi), dtype=complex)
        return f.reshape(len(xi), self.m)

    def samples(self, degree=None):
        "Quadrature nodes and density samples at ``degree`` (default the bandwidth)."
        degree = self.bandwidth if degree is None else degree
        nodes, _ = specfun.sphere_quadrature(self.n, degree)
        return nodes, self.density(nodes)

    def required_degree(self, radius):
        "Quadrature degree that resolves the integrand for all points with ``|x| <= radius``."
        need = self.bandwidth + _wave_bandwidth(radius, self.tol)
        return int(np.ceil((need - 1) / 2.))

    def _rule(self, degree):
        if degree not in self._rules:
            nodes, weights = specfun.sphere_quadrature(self.n, degree)
            self._rules[degree] = (nodes, weights[:, None] * self.density(nodes))
        return self._rules[degree]

    def __call__(self, x):
        x = _as_points(x, self.n)
        radius = float(np.linalg.norm(x, axis=1).max()) if len(x) else 0.
        need = self.required_degree(radius)
        if self.degree is None:
            degree = need
        elif self.degree < need:
            raise QuadratureError("quadrature degree %s is insufficient for |x| <= %.3g at tol %.1e (need %s)"
                                  % (self.degree, radius, self.tol, need))
        else:
            degree = self.degree
        nodes, wf = self._rule(degree)
        out = np.empty((x.shape[0], self.m), dtype=complex)
        for s in _blocks(x.shape[0]):
            out[s] = np.exp(1j * x[s] @ nodes.T) @ wf
        return out


class HarmonicExpansion(Wave):
    """
    A wave as a Bessel--harmonic expansion :math:`\\sum_{l\\le L}\\sum_k b_{lk} j_l(r) Y_{lk}(\\omega)`.

    Parameters
    ----------
    n : int
        Dimension, 2 or 3.

    L : int
        Degree cutoff.

    coefficients : array
        Shape ``(D, m)`` with rows ordered as :func:`eigenloc.specfun.harmonic_index`.

    Attributes
    ----------
    truncation_error : float or None
        The :math:`L^2` truncation error reported by :func:`expand_wave`, if the expansion came from there.
    """
    kind = "harmonic_expansion"

    def __init__(self, n, L, coefficients):
        if n not in (2, 3):
            raise ValueError("harmonic expansions are only provided for n in {2, 3}")
        self.n = n
        self.L = int(L)
        self.index = specfun.harmonic_index(n, self.L)
        self.coefficients = _as_coefficients(np.asarray(coefficients, dtype=complex), len(self.index))
        self.m = self.coefficients.shape[1]
        self.degrees = np.array([l for l, _ in self.index])
        self.truncation_error = None

    def _evaluate(self, x):
        r = np.linalg.norm(x, axis=1)
        omega = np.where(r[:, None] > 0, x / np.where(r > 0, r, 1.)[:, None], np.eye(self.n)[0])
        basis = specfun.harmonic_basis(self.n, self.L, omega)
        radial = np.stack([specfun.hyperspherical_bessel(l, self.n, r) for l in range(self.L + 1)], axis=-1)
        return (basis * radial[:, self.degrees]) @ self.coefficients

    def to_density(self):
        "Shortcut for :func:`expansion_to_density`."
        return expansion_to_density(self)


def eval_wave(wave, x):
    """
    Evaluate any wave representation at points ``x`` of shape ``(P, n)`` (or a single point).

    Returns
    -------
    array
        Complex values, shape ``(P, m)``.
    """
    return wave(x)


def helmholtz_residual(wave, grid):
    """
    Sup over interior grid nodes of :math:`|\\Delta_h\\phi + \\phi|` with the second-order centred stencil.

    Parameters
    ----------
    wave : callable
        A wave (any representation) or any field evaluator.

    grid : :class:`eigenloc.analysis.EvaluationGrid`
        The grid, which must have at least 5 nodes per axis.

    Returns
    -------
    residual : float
        The sup norm of the discrete Helmholtz residual over masked interior nodes.

    scale : float
        :math:`h^2`, the expected order of the residual for a smooth wave.
    """
    from .analysis import laplacian, interior_sup

    values = grid.fill(wave)
    residual = laplacian(values, grid.h) + values
    return interior_sup(residual, grid.mask), grid.h ** 2


def _radial_conditioning(l, n, radii):
    jl = specfun.hyperspherical_bessel(l, n, radii)
    jl1 = specfun.hyperspherical_bessel(l + 1, n, radii)
    envelope = np.sqrt(jl ** 2 + jl1 ** 2)
    safe = np.where(envelope > 0, envelope, 1.)
    return jl, np.max(np.where(envelope > 0, np.abs(jl) / safe, 0.))


def expand_wave(field, n, L, radius=2.0, n_radii=None, degree=None, cond_tol=1e-6):
    r"""
    Bessel--harmonic expansion of a monochromatic wave sampled on the ball of radius ``radius``.

    The wave is sampled on spheres at Gauss--Legendre radii in :math:`(0, \mathrm{radius})`, projected on
    :math:`L^2(S^{n-1})` at each radius, and each coefficient :math:`b_{lk}` is fitted across radii by least squares
    against :math:`j_l(r)`. The :math:`L^2(B)` norm of the difference between the wave and the truncated expansion is
    stored in ``truncation_error``.

    Parameters
    ----------
    field : callable
        Maps points ``(P, n)`` to values ``(P, m)`` or ``(P,)``.

    n : int
        Dimension, 2 or 3.

    L : int
        Degree cutoff.

    radius : float, optional
        Radius of the sampled ball.

    n_radii : int, optional
        Number of sample radii. Defaults to ``max(L + 4, 12)``.

    degree : int, optional
        Sphere quadrature degree. Defaults to a degree resolving harmonics of the wave at ``radius``.

    cond_tol : float, optional
        The fit for degree ``l`` is rejected when :math:`|j_l|` is below ``cond_tol`` times its local envelope at
        every radius.

    Returns
    -------
    :class:`HarmonicExpansion`
    """
    if n not in (2, 3):
        raise ValueError("expand_wave supports n in {2, 3}")
    n_radii = max(L + 4, 12) if n_radii is None else n_radii
    degree = L + _wave_bandwidth(radius, 1e-14) + 8 if degree is None else degree

    t, wt = np.polynomial.legendre.leggauss(n_radii)
    radii = radius * (t + 1) / 2.
    wr = radius * wt / 2. * radii ** (n - 1)

    nodes, weights = specfun.sphere_quadrature(n, degree)
    basis = specfun.harmonic_basis(n, L, nodes)
    index = specfun.harmonic_index(n, L)
    degrees = np.array([l for l, _ in index])

    samples = []
    for r in radii:
        v = np.asarray(field(r * nodes))
        samples.append(v.reshape(len(nodes), -1))
    samples = np.array(samples, dtype=complex)
    m = samples.shape[-1]
    # (radii, D, m) projections
    proj = np.einsum('qd,rqm->rdm', basis * weights[:, None], samples)

    coeffs = np.zeros((len(index), m), dtype=complex)
    radial = np.zeros((n_radii, L + 1))
    for l in range(L + 1):
        jl, conditioning = _radial_conditioning(l, n, radii)
        if conditioning < cond_tol:
            raise IllConditionedFitError("radial fit for degree %s is ill-conditioned: j_l is near a zero at every "
                                         "sample radius" % l)
        radial[:, l] = jl
        rows = degrees == l
        coeffs[rows] = np.einsum('r,rdm->dm', jl, proj[:, rows]) / np.sum(jl ** 2)

    expansion = HarmonicExpansion(n, L, coeffs)

    recon = np.einsum('qd,rd,dm->rqm', basis, radial[:, degrees], coeffs)
    err2 = np.einsum('r,q,rqm->', wr, weights, np.abs(samples - recon) ** 2)
    expansion.truncation_error = float(np.sqrt(max(err2.real, 0.)))
    logger.info("expanded wave to degree %s on B_%s: L2 truncation error %.3e", L, radius,
                expansion.truncation_error)
    return expansion


def expansion_to_density(expansion):
    r"""
    The Herglotz density of a harmonic expansion.

    .. math:: f_1(\xi) = \sum_{l,k} \frac{b_{lk}}{(2\pi)^{n/2} i^l} Y_{lk}(\xi),

    whose Herglotz integral reproduces the expansion exactly. Real coefficients give a density with
    :math:`f_1(\xi) = \overline{f_1(-\xi)}`.
    """
    n, L = expansion.n, expansion.L
    scale = (2 * np.pi) ** (n / 2.) * (1j ** expansion.degrees)
    a = expansion.coefficients / scale[:, None]

    def func(xi):
        return specfun.harmonic_basis(n, L, np.atleast_2d(xi)) @ a

    real = bool(np.allclose(np.imag(expansion.coefficients), 0, atol=1e-12))
    return HerglotzDensity(func, n, m=expansion.m, real=real, bandwidth=L)


def plane_wave_expansion(direction, L, amplitude=1.):
    r"""
    Harmonic expansion of :math:`a\,e^{ix\cdot\xi_0}` truncated at degree ``L``.

    The coefficients are :math:`b_{lk} = a(2\pi)^{n/2} i^l Y_{lk}(\xi_0)`.
    """
    direction = np.asarray(direction, dtype=float)
    n = direction.shape[-1]
    index = specfun.harmonic_index(n, L)
    degrees = np.array([l for l, _ in index])
    Y = specfun.harmonic_basis(n, L, direction[None, :])[0]
    return HarmonicExpansion(n, L, amplitude * (2 * np.pi) ** (n / 2.) * (1j ** degrees) * Y)
