"""
Eigenfunctions of the Laplacian on the round sphere :math:`S^n` built from ultraspherical kernels.

A degree-``N`` eigenfunction is written as

.. math:: \\psi(p) = \\sum_j \\frac{c_j}{2^{n/2-1}\\Gamma(n/2)} C^n_N(p\\cdot p_j),

which by the addition theorem lies in the eigenspace of eigenvalue :math:`N(N+n-1)`. Placing the poles at
:math:`p_j = \\Psi^{-1}(x_j/N)` in normal geodesic coordinates :math:`\\Psi` around a base point makes the rescaled
function :math:`\\psi\\circ\\Psi^{-1}(\\cdot/N)` converge to the Bessel sum :math:`\\sum_j c_j J_{n/2-1}(|x-x_j|)/
|x-x_j|^{n/2-1}` at rate :math:`O(1/N)`; this is what :func:`synthesize_sphere` does.

Plane-wave sums are localized the same way by powers of complex null vectors, see :class:`PlaneWaveHarmonic`.

.. note:: The sphere here is :math:`S^n\subset\mathbb{R}^{n+1}`, so degree-``N`` harmonics have eigenvalue
          :math:`N(N+n-1)`, not the :math:`N(N+n-2)` of :math:`S^{n-1}`.
"""
import itertools
import logging

import numpy as np

from . import specfun

logger = logging.getLogger(__name__)

__all__ = ['GeodesicChart', 'SphereEigenfunction', 'PlaneWaveHarmonic', 'chart_map', 'synthesize_sphere',
           'synthesize_plane_waves', 'eval_sphere', 'multi_synthesize', 'decay_profile']

#: Points closer than this to the antipode of the base point have no chart pre-image.
ANTIPODAL_TOL = 1e-6


class GeodesicChart(object):
    r"""
    Normal geodesic coordinates :math:`\mathbb{R}^n\supset B_\pi\to S^n` around a base point.

    Parameters
    ----------
    base : array
        Unit vector :math:`p_0\in\mathbb{R}^{n+1}`.

    frame : array, optional
        Orthonormal basis of the tangent space at :math:`p_0`, shape ``(n+1, n)``. By default it is obtained by
        Gram--Schmidt of :math:`p_0` against the coordinate vectors.
    """

    def __init__(self, base, frame=None):
        base = np.asarray(base, dtype=float)
        if abs(np.linalg.norm(base) - 1) > 1e-10:
            raise ValueError("the base point must be a unit vector")
        self.base = base
        self.n = len(base) - 1
        if frame is None:
            q, _ = np.linalg.qr(np.column_stack([base, np.eye(self.n + 1)]))
            frame = q[:, 1:self.n + 1]
        frame = np.asarray(frame, dtype=float)
        if frame.shape != (self.n + 1, self.n):
            raise ValueError("frame must have shape (n+1, n)")
        if not np.allclose(frame.T @ frame, np.eye(self.n), atol=1e-10) or not np.allclose(frame.T @ base, 0,
                                                                                            atol=1e-10):
            raise ValueError("frame must be orthonormal and orthogonal to the base point")
        self.frame = frame
        self.radius = np.pi

    @classmethod
    def at_pole(cls, n):
        "Chart around the last coordinate vector of :math:`\\mathbb{R}^{n+1}`."
        return cls(np.eye(n + 1)[-1])

    def __call__(self, x):
        return chart_map(self, x)

    def inverse(self, p):
        return chart_map(self, p, inverse=True)


def chart_map(chart, x, inverse=False):
    r"""
    The geodesic chart or its inverse.

    Forward: :math:`p = \cos|x|\,p_0 + \sin|x|\,(Fx)/|x|` with ``F`` the frame, for :math:`|x|<\pi`.
    Inverse: the exact left inverse, defined away from :math:`-p_0`.

    Parameters
    ----------
    chart : :class:`GeodesicChart`
        The chart.

    x : array
        Chart points, shape ``(P, n)`` (forward), or unit vectors of shape ``(P, n+1)`` (inverse).

    inverse : bool, optional
        Whether to apply the inverse map.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if not inverse:
        if x.shape[-1] != chart.n:
            raise ValueError("chart points must have trailing dimension %s" % chart.n)
        t = np.linalg.norm(x, axis=1)
        if np.any(t >= np.pi):
            raise ValueError("the geodesic chart is only defined for |x| < pi")
        # sin(t)/t, continuous at 0
        return np.cos(t)[:, None] * chart.base + np.sinc(t / np.pi)[:, None] * (x @ chart.frame.T)

    if x.shape[-1] != chart.n + 1:
        raise ValueError("sphere points must have trailing dimension %s" % (chart.n + 1))
    if np.any(np.abs(np.linalg.norm(x, axis=1) - 1) > 1e-10):
        raise ValueError("sphere points must be unit vectors")
    if np.any(np.linalg.norm(x + chart.base, axis=1) < ANTIPODAL_TOL):
        raise ValueError("points antipodal to the base point have no chart pre-image")
    c = x @ chart.base
    y = x @ chart.frame
    s = np.linalg.norm(y, axis=1)
    theta = np.arctan2(s, c)
    scale = np.where(s > 0, theta / np.where(s > 0, s, 1.), 1.)
    return scale[:, None] * y


class SphereEigenfunction(object):
    r"""
    A degree-``N`` eigenfunction on :math:`S^n`: a weighted sum of normalised ultraspherical kernels.

    Parameters
    ----------
    N : int
        Degree.

    n : int
        Dimension of the sphere.

    coefficients : array
        Shape ``(J, m)`` (or ``(J,)``): the :math:`c_j`.

    points : array
        Shape ``(J, n+1)``: the unit vectors :math:`p_j`.
    """

    def __init__(self, N, n, coefficients, points, m=None):
        self.N, self.n = int(N), int(n)
        points = np.asarray(points, dtype=float).reshape(-1, n + 1)
        coefficients = np.asarray(coefficients)
        if coefficients.size == 0:
            coefficients = coefficients.reshape(0, m or (coefficients.shape[1] if coefficients.ndim == 2 else 1))
        elif coefficients.ndim == 1:
            coefficients = coefficients[:, None]
        if len(coefficients) != len(points):
            raise ValueError("need one coefficient row per point")
        if len(points) and np.any(np.abs(np.linalg.norm(points, axis=1) - 1) > 1e-10):
            raise ValueError("kernel poles must be unit vectors")
        self.coefficients = coefficients
        self.points = points
        self.m = coefficients.shape[1]

    @property
    def normalization(self):
        "The constant :math:`1/(2^{n/2-1}\\Gamma(n/2))`."
        return specfun.bessel_kernel_limit(self.n)

    @property
    def weights(self):
        "The kernel weights :math:`c_j/(2^{n/2-1}\\Gamma(n/2))`."
        return self.coefficients * self.normalization

    @property
    def eigenvalue(self):
        return self.N * (self.N + self.n - 1)

    @property
    def parity(self):
        return 1 if self.N % 2 == 0 else -1

    def __len__(self):
        return len(self.points)

    def __call__(self, p):
        return eval_sphere(self, p)

    def rescaled(self, chart):
        r"The function :math:`x\mapsto\psi(\Psi^{-1}(x/N))` in the given chart."

        def field(x):
            return self(chart_map(chart, np.asarray(x, dtype=float) / self.N))

        return field

    def __add__(self, other):
        if (self.N, self.n, self.m) != (other.N, other.n, other.m):
            raise ValueError("only eigenfunctions of equal degree, dimension and components can be added")
        return SphereEigenfunction(self.N, self.n, np.concatenate([self.coefficients, other.coefficients]),
                                   np.concatenate([self.points, other.points]), m=self.m)


def eval_sphere(psi, p):
    """
    Evaluate a :class:`SphereEigenfunction` at unit vectors ``p`` of shape ``(P, n+1)``.

    Returns
    -------
    array
        Shape ``(P, m)``.
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    if p.shape[-1] != psi.n + 1:
        raise ValueError("points must have trailing dimension %s" % (psi.n + 1))
    if np.any(np.abs(np.linalg.norm(p, axis=1) - 1) > 1e-10):
        raise ValueError("evaluation points must lie on the unit sphere")

    weights = psi.weights
    out = np.zeros((len(p), psi.m), dtype=np.result_type(weights, float))
    if len(psi) == 0:
        return out
    for start in range(0, len(p), 8192):
        t = np.clip(p[start:start + 8192] @ psi.points.T, -1, 1)
        out[start:start + 8192] = specfun.gegenbauer_norm(psi.N, psi.n, t) @ weights
    return out


def synthesize_sphere(bs, N, chart):
    """
    The eigenfunction of degree ``N`` localizing the Bessel sum ``bs`` in the chart.

    Parameters
    ----------
    bs : :class:`~eigenloc.waves.BesselSum`
        The target; its dimension must match the chart.

    N : int
        Degree; must exceed the radius of ``bs``.

    chart : :class:`GeodesicChart`
        Chart around the localization point.

    Returns
    -------
    :class:`SphereEigenfunction`
    """
    if bs.n != chart.n:
        raise ValueError("Bessel sum in R^%s does not fit a chart of S^%s" % (bs.n, chart.n))
    if not N > bs.radius:
        raise ValueError("N=%s must exceed the Bessel-sum radius %s" % (N, bs.radius))
    points = chart_map(chart, bs.centers / N) if len(bs) else np.zeros((0, chart.n + 1))
    logger.debug("synthesized degree-%s eigenfunction on S^%s with %s kernels", N, chart.n, len(bs))
    return SphereEigenfunction(N, chart.n, bs.coefficients, points, m=bs.m)


class PlaneWaveHarmonic(object):
    r"""
    A degree-``N`` eigenfunction on :math:`S^n` built from complex null vectors of a chart.

    .. math:: \psi(p) = \sum_k c_k\,(p\cdot w_k)^N,\qquad w_k = p_0 + iF\xi_k,

    with :math:`p_0` the base point and :math:`F` the frame of the chart. Since :math:`w_k\cdot w_k = 0`, each
    :math:`(x\cdot w_k)^N` is a harmonic homogeneous polynomial of degree ``N`` on :math:`\mathbb{R}^{n+1}`, so
    :math:`\psi` lies in the eigenspace :math:`N(N+n-1)`. In the chart,
    :math:`(\Psi^{-1}(x/N)\cdot w_k)^N = e^{i\xi_k\cdot x}\,(1 + O(|x|^2/N))`.

    Parameters
    ----------
    N : int
        Degree.

    chart : :class:`GeodesicChart`
        Chart fixing :math:`p_0` and :math:`F`.

    coefficients : array
        Shape ``(K, m)`` (or ``(K,)``): the :math:`c_k`.

    directions : array
        Shape ``(K, n)``: unit vectors :math:`\xi_k`.
    """

    def __init__(self, N, chart, coefficients, directions):
        self.N, self.n = int(N), chart.n
        if self.N < 1:
            raise ValueError("degree N must be positive")
        self.chart = chart
        directions = np.asarray(directions, dtype=float).reshape(-1, self.n)
        coefficients = np.asarray(coefficients, dtype=complex)
        if coefficients.ndim == 1:
            coefficients = coefficients[:, None]
        if len(coefficients) != len(directions):
            raise ValueError("need one coefficient row per direction")
        if len(directions) and np.any(np.abs(np.linalg.norm(directions, axis=1) - 1) > 1e-10):
            raise ValueError("plane-wave directions must be unit vectors")
        self.coefficients = coefficients
        self.directions = directions
        self.m = coefficients.shape[1]
        self.nulls = chart.base[None, :] + 1j * directions @ chart.frame.T

    @property
    def eigenvalue(self):
        return self.N * (self.N + self.n - 1)

    @property
    def parity(self):
        return 1 if self.N % 2 == 0 else -1

    def __len__(self):
        return len(self.directions)

    def __call__(self, p):
        p = np.atleast_2d(np.asarray(p, dtype=float))
        if p.shape[-1] != self.n + 1:
            raise ValueError("points must have trailing dimension %s" % (self.n + 1))
        if np.any(np.abs(np.linalg.norm(p, axis=1) - 1) > 1e-10):
            raise ValueError("evaluation points must lie on the unit sphere")
        out = np.zeros((len(p), self.m), dtype=complex)
        for start in range(0, len(p), 8192):
            out[start:start + 8192] = (p[start:start + 8192] @ self.nulls.T) ** self.N @ self.coefficients
        return out

    def rescaled(self, chart=None):
        r"The function :math:`x\mapsto\psi(\Psi^{-1}(x/N))`, by default in the chart of the construction."
        chart = self.chart if chart is None else chart

        def field(x):
            return self(chart_map(chart, np.asarray(x, dtype=float) / self.N))

        return field


def synthesize_plane_waves(pws, N, chart):
    """
    The degree-``N`` eigenfunction localizing the plane-wave sum ``pws`` in the chart.

    The rescaled error is at most about :math:`|x|^2/(2N)` times :math:`\\sum_k|c_k|`, so ``N`` must grow with the
    square of the radius of interest.

    Parameters
    ----------
    pws : :class:`~eigenloc.waves.PlaneWaveSum`
        The target; its dimension must match the chart.

    N : int
        Degree.

    chart : :class:`GeodesicChart`
        Chart around the localization point.

    Returns
    -------
    :class:`PlaneWaveHarmonic`
    """
    if pws.n != chart.n:
        raise ValueError("plane-wave sum in R^%s does not fit a chart of S^%s" % (pws.n, chart.n))
    logger.debug("synthesized degree-%s plane-wave harmonic on S^%s with %s terms", N, chart.n, len(pws))
    return PlaneWaveHarmonic(N, chart, pws.coefficients, pws.directions)


def _separation(bases):
    rho = np.inf
    for a, b in itertools.combinations(range(len(bases)), 2):
        if np.linalg.norm(bases[a] - bases[b]) < ANTIPODAL_TOL:
            raise ValueError("base points %s and %s coincide" % (a, b))
        if np.linalg.norm(bases[a] + bases[b]) < ANTIPODAL_TOL:
            raise ValueError("base points %s and %s are antipodal" % (a, b))
        d = np.arccos(np.clip(bases[a] @ bases[b], -1, 1))
        rho = min(rho, d / 2, (np.pi - d) / 2)
    return rho


def multi_synthesize(targets, N):
    r"""
    Localize several Bessel sums at once, one per chart, in a single degree-``N`` eigenfunction.

    Parameters
    ----------
    targets : list of (:class:`GeodesicChart`, :class:`~eigenloc.waves.BesselSum`)
        Charts with pairwise distinct, non-antipodal base points.

    N : int
        Degree, larger than every Bessel-sum radius.

    Returns
    -------
    psi : :class:`SphereEigenfunction`
        The sum of the single-target eigenfunctions.

    interference : float
        Bound on the contribution of the other targets near any base point: :func:`decay_profile` at the separation
        radius :math:`\rho` (half the least distance between a base point and another base point or its antipode)
        times the largest combined absolute weight of all targets but one. Zero for one target.
    """
    if not targets:
        raise ValueError("at least one target is needed")
    parts = [synthesize_sphere(bs, N, chart) for chart, bs in targets]
    psi = parts[0]
    for part in parts[1:]:
        psi = psi + part
    if len(targets) == 1:
        return psi, 0.

    rho = _separation([chart.base for chart, _ in targets])
    totals = np.array([np.sum(np.abs(part.weights)) for part in parts])
    # the other targets together, at the worst base point
    weight = float(np.max(totals.sum() - totals))
    interference = decay_profile(N, psi.n, rho) * weight
    logger.info("multi-point synthesis: %s targets, rho=%.3f, interference bound %.3e", len(targets), rho,
                interference)
    return psi, interference


def decay_profile(N, n, rho, samples=None):
    r"""
    Sup of :math:`|C^n_N(\cos\theta)|` over :math:`\theta\in[\rho,\pi-\rho]`.

    Parameters
    ----------
    N, n : int
        Degree and sphere dimension.

    rho : float
        Excluded angular radius around both poles, in :math:`(0, \pi/2)`.

    samples : int, optional
        Grid size; the default ``max(2000, 20 N)`` resolves every oscillation.

    Returns
    -------
    float
    """
    if not 0 < rho < np.pi / 2:
        raise ValueError("rho must lie in (0, pi/2)")
    samples = max(2000, 20 * N) if samples is None else samples
    theta = np.linspace(rho, np.pi - rho, samples)
    return float(np.max(np.abs(specfun.gegenbauer_norm(N, n, np.cos(theta)))))
