"""
Discretization of Herglotz integrals into finite wave sums.

Two procedures are provided:

* a cap cover of :math:`S^{n-1}` turns a density :math:`f` into the plane-wave sum
  :math:`\\sum_k f(\\xi_k)|U_k| e^{i\\xi_k\\cdot x}` (:func:`discretize_density`);
* the density is extended to a compactly supported :math:`g(\\xi) = \\chi(|\\xi|)f(\\xi/|\\xi|)`, whose Fourier
  transform :math:`\\hat g(x) = (2\\pi)^{-n}\\int g(\\xi)e^{ix\\cdot\\xi}d\\xi` is sampled on a cover of the ball
  :math:`B_R`, giving the Bessel sum
  :math:`\\sum_j (2\\pi)^{n/2}\\hat g(x_j)|U_j|\\, J_{n/2-1}(|x-x_j|)/|x-x_j|^{n/2-1}`
  (:func:`extend_and_transform` followed by :func:`discretize_fourier`).

Both have error linear in the cell diameter when the representative point is an arbitrary point of the cell (use
``choice="corner"`` to see that rate); the cell centre used by default is usually one order better.
"""
import logging

import numpy as np
from scipy.spatial import cKDTree

from . import dft, specfun
from .waves import BesselSum, HarmonicExpansion, PlaneWaveSum, expand_wave, expansion_to_density

logger = logging.getLogger(__name__)

__all__ = ['SphericalCapCover', 'BallCellCover', 'BumpProfile', 'FourierSamples', 'TailBoundError', 'CoverSizeError',
           'build_cap_cover', 'discretize_density', 'extend_and_transform', 'discretize_fourier',
           'approximate_bessel']

#: Default maximum number of cells in any cover.
MAX_CELLS = 10 ** 6

CHOICES = ("center", "corner")

#: Largest number of FFT nodes used for the tail-mass profile; coarser steps are taken beyond it.
MAX_TAIL_POINTS = 2 ** 22


class TailBoundError(ArithmeticError):
    "The Fourier tail mass outside the requested radius exceeds the requested bound."


class CoverSizeError(ValueError):
    "The requested cover would have more cells than allowed."


def _sin_power_integral(p, a, b):
    r"Closed form of :math:`\int_a^b \sin^p\theta\, d\theta` by the reduction formula."
    if p == 0:
        return b - a
    if p == 1:
        return np.cos(a) - np.cos(b)
    boundary = (-np.sin(b) ** (p - 1) * np.cos(b) + np.sin(a) ** (p - 1) * np.cos(a)) / p
    return boundary + (p - 1.) / p * _sin_power_integral(p - 2, a, b)


def _num_pieces(eps):
    return max(1, int(np.ceil(2 * np.pi / eps - 1e-9)))


def _band_sin_max(a, b):
    return 1. if a <= np.pi / 2 <= b else max(np.sin(a), np.sin(b))


def _count_cells(d, eps):
    if d == 1:
        M = _num_pieces(eps)
        return M + (M % 2 if M > 1 else 0)
    K = _num_pieces(eps)
    delta = np.pi / K
    count = min(K, 2)
    for i in range(1, K - 1):
        s = _band_sin_max(i * delta, (i + 1) * delta)
        count += _count_cells(d - 1, (eps - delta) / s)
    return count


def _zonal_cells(d, eps):
    """
    Cells of a zonal partition of :math:`S^d` in hyperspherical angles, as arrays
    ``(lo, hi, center, corner, area, diameter)``.
    """
    if d == 1:
        M = _num_pieces(eps)
        if M > 1 and M % 2:
            M += 1
        edges = 2 * np.pi * np.arange(M + 1) / M
        lo, hi = edges[:-1, None], edges[1:, None]
        return (lo, hi, (lo + hi) / 2, lo.copy(), np.full(M, 2 * np.pi / M),
                np.full(M, min(2 * np.pi / M, np.pi)))

    K = _num_pieces(eps)
    delta = np.pi / K
    edges = np.linspace(0, np.pi, K + 1)
    full_lo = np.zeros(d - 1)
    full_hi = np.array([np.pi] * (d - 2) + [2 * np.pi])
    rest = np.zeros(d - 1)
    sub_area = specfun.sphere_area(d)

    parts = []
    for i in range(K):
        a, b = edges[i], edges[i + 1]
        area = _sin_power_integral(d - 1, a, b)
        if i == 0 or i == K - 1:
            # polar cap: a single cell centred at the pole
            pole = 0. if i == 0 else np.pi
            parts.append((np.r_[a, full_lo][None], np.r_[b, full_hi][None], np.r_[pole, rest][None],
                          np.r_[a, rest][None], np.array([area * sub_area]), np.array([min(2 * delta, np.pi)])))
            continue

        s = _band_sin_max(a, b)
        slo, shi, scen, scor, sarea, sdiam = _zonal_cells(d - 1, (eps - delta) / s)
        c = len(sarea)
        parts.append((np.column_stack([np.full(c, a), slo]), np.column_stack([np.full(c, b), shi]),
                      np.column_stack([np.full(c, (a + b) / 2), scen]), np.column_stack([np.full(c, a), scor]),
                      area * sarea, np.minimum(delta + s * sdiam, np.pi)))

    return tuple(np.concatenate(col) for col in zip(*parts))


class SphericalCapCover(object):
    r"""
    A partition of :math:`S^{n-1}` into zonal cells of geodesic diameter at most ``eps``.

    :math:`S^1` is cut into equal arcs (an even number whenever there is more than one, so the cover is symmetric under
    :math:`\xi\to-\xi`). :math:`S^{d}` is cut into ``K`` latitude bands of width :math:`\pi/K \le \epsilon/2`; the two
    polar bands are single caps and every other band is the product of the band with a cover of :math:`S^{d-1}` of
    diameter :math:`(\epsilon - \pi/K)/\max\sin\theta`. Cell areas are exact.

    Parameters
    ----------
    n : int
        Ambient dimension (the sphere is :math:`S^{n-1}\subset\mathbb{R}^n`), ``n >= 2``.

    eps : float
        Upper bound on the geodesic diameter of each cell.

    max_cells : int, optional
        Refuse to build covers with more cells than this.
    """

    def __init__(self, n, eps, max_cells=MAX_CELLS):
        if n < 2:
            raise ValueError("n must be at least 2")
        if not eps > 0:
            raise ValueError("eps must be positive")
        self.n = n
        self.eps = float(eps)

        count = _count_cells(n - 1, self.eps)
        if count > max_cells:
            raise CoverSizeError("a cover of S^%s with eps=%s needs %s cells, over the cap of %s"
                                 % (n - 1, eps, count, max_cells))

        self.lo, self.hi, self._center, self._corner, self.areas, self.diameters = _zonal_cells(n - 1, self.eps)
        self._closed = np.isclose(self.hi, np.array([np.pi] * (n - 2) + [2 * np.pi]))
        logger.debug("built cap cover of S^%s with %s cells (eps=%s)", n - 1, len(self), eps)

    def __len__(self):
        return len(self.areas)

    @property
    def centers(self):
        "Cell centres, shape ``(C, n)``."
        return self.points("center")

    def points(self, choice="center"):
        """
        Representative points of every cell.

        Parameters
        ----------
        choice : {"center", "corner"}
            ``center`` is the angular midpoint of each cell (the pole for polar caps); ``corner`` is the vertex with
            the smallest angles.
        """
        if choice not in CHOICES:
            raise ValueError("choice must be one of %s" % (CHOICES,))
        return specfun.from_angles(self._center if choice == "center" else self._corner)

    @property
    def total_area(self):
        return float(np.sum(self.areas))

    @property
    def antipodal_symmetric(self):
        "Whether the set of cell centres is closed under :math:`\\xi\\to-\\xi`."
        c = self.centers
        dist, _ = cKDTree(c).query(-c)
        return bool(np.all(dist < 1e-9))

    def locate(self, xi):
        """
        Index of the cell containing each unit vector (``-1`` if none, which only happens for non-unit input).

        Membership compares hyperspherical angles with the half-open cell bounds; bounds at the end of an angle's
        range are closed.
        """
        xi = specfun._check_unit(np.atleast_2d(xi), tol=1e-9)
        angles = specfun.to_angles(xi)
        out = np.full(len(angles), -1, dtype=int)
        for start in range(0, len(angles), 512):
            ang = angles[start:start + 512, None, :]
            inside = (ang >= self.lo) & ((ang < self.hi) | (self._closed & (ang <= self.hi)))
            inside = np.all(inside, axis=-1)
            found = inside.any(axis=1)
            out[start:start + 512][found] = np.argmax(inside[found], axis=1)
        return out


def build_cap_cover(n, eps, max_cells=MAX_CELLS):
    """
    Build a :class:`SphericalCapCover` of :math:`S^{n-1}` with cell diameters at most ``eps``.

    Raises
    ------
    CoverSizeError
        If the cover would exceed ``max_cells`` cells.
    """
    return SphericalCapCover(n, eps, max_cells=max_cells)


class BallCellCover(object):
    r"""
    A partition of the ball :math:`B_R\subset\mathbb{R}^n` into cells of diameter at most ``delta2``.

    The ball is cut into concentric shells of width :math:`\Delta r = R/\lceil 2R/\delta''\rceil`. The innermost ball of
    radius :math:`\Delta r` is one cell; the shell :math:`a\le r\le b` is the product with a cap cover of diameter
    :math:`(\delta''-\Delta r)/b`. Volumes are exact.

    Parameters
    ----------
    n : int
        Dimension.

    R : float
        Radius of the ball.

    delta2 : float
        Diameter bound.

    max_cells : int, optional
        Cell cap, as for :class:`SphericalCapCover`.
    """

    def __init__(self, n, R, delta2, max_cells=MAX_CELLS):
        if not R > 0 or not delta2 > 0:
            raise ValueError("R and delta2 must be positive")
        self.n, self.R, self.delta2 = n, float(R), float(delta2)

        K = max(1, int(np.ceil(2 * R / delta2 - 1e-9)))
        dr = self.R / K
        unit = specfun.sphere_area(n) / n
        origin = np.zeros((1, n))

        centers, corners, volumes, diameters = [origin], [origin], [np.array([unit * dr ** n])], [np.array([2 * dr])]
        count = 1
        for i in range(1, K):
            a, b = i * dr, (i + 1) * dr
            shell = build_cap_cover(n, (delta2 - dr) / b, max_cells=max_cells)
            count += len(shell)
            if count > max_cells:
                raise CoverSizeError("ball cover with R=%s, delta2=%s exceeds %s cells" % (R, delta2, max_cells))
            centers.append((a + b) / 2 * shell.centers)
            corners.append(a * shell.points("corner"))
            volumes.append(shell.areas * (b ** n - a ** n) / n)
            diameters.append(dr + b * shell.diameters)

        self._center = np.concatenate(centers)
        self._corner = np.concatenate(corners)
        self.volumes = np.concatenate(volumes)
        self.diameters = np.concatenate(diameters)
        logger.debug("built ball cover of B_%s with %s cells (delta2=%s)", R, len(self), delta2)

    def __len__(self):
        return len(self.volumes)

    @property
    def centers(self):
        return self._center

    def points(self, choice="center"):
        "Representative points; ``center`` uses the mid-radius and angular centre, ``corner`` the inner corner."
        if choice not in CHOICES:
            raise ValueError("choice must be one of %s" % (CHOICES,))
        return self._center if choice == "center" else self._corner

    @property
    def total_volume(self):
        return float(np.sum(self.volumes))


def _smooth_step(t):
    t = np.clip(t, 0, 1)
    with np.errstate(divide='ignore', over='ignore'):
        e0 = np.where(t > 0, np.exp(-1 / np.where(t > 0, t, 1.)), 0.)
        e1 = np.where(t < 1, np.exp(-1 / np.where(t < 1, 1 - t, 1.)), 0.)
    return e0 / (e0 + e1)


class BumpProfile(object):
    r"""
    Smooth radial bump :math:`\chi` equal to 1 for :math:`|s-1|<a` and 0 for :math:`|s-1|>b`.

    The transition is :math:`\chi(s)=h((b-|s-1|)/(b-a))` with the :math:`C^\infty` step
    :math:`h(t)=e^{-1/t}/(e^{-1/t}+e^{-1/(1-t)})`.
    """

    def __init__(self, a=0.25, b=0.5):
        if not 0 < a < b < 1:
            raise ValueError("need 0 < a < b < 1, got a=%s, b=%s" % (a, b))
        self.a, self.b = float(a), float(b)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return _smooth_step((self.b - np.abs(s - 1)) / (self.b - self.a))

    @property
    def support(self):
        return 1 - self.b, 1 + self.b


def discretize_density(f, cover, choice="center"):
    """
    Riemann-sum discretization of a Herglotz integral over a cap cover.

    Parameters
    ----------
    f : :class:`~eigenloc.waves.HerglotzDensity`
        Anything with a ``density(xi)`` method.

    cover : :class:`SphericalCapCover`
        Cover of :math:`S^{n-1}`.

    choice : {"center", "corner"}
        Representative point of each cell.

    Returns
    -------
    :class:`~eigenloc.waves.PlaneWaveSum`
        One term :math:`f(\\xi_k)|U_k|e^{i\\xi_k\\cdot x}` per cell.
    """
    if cover.n != f.n:
        raise ValueError("density on S^%s cannot be discretized with a cover of S^%s" % (f.n - 1, cover.n - 1))
    xi = cover.points(choice)
    return PlaneWaveSum(f.density(xi) * cover.areas[:, None], xi)


class FourierSamples(object):
    r"""
    The Fourier transform :math:`\hat g` of the bump extension :math:`g(\xi)=\chi(|\xi|)f(\xi/|\xi|)` of a density.

    Calling the object evaluates :math:`\hat g` at arbitrary points by tensor quadrature over the annulus
    (Gauss--Legendre in :math:`|\xi|` on the three smooth pieces of :math:`\chi`, times the sphere quadrature of the
    density). The transform can also be sampled on a whole grid with an FFT (:meth:`on_grid`), which is what the tail
    estimates use.

    Parameters
    ----------
    density : :class:`~eigenloc.waves.HerglotzDensity`
        The density :math:`f`.

    bump : :class:`BumpProfile`, optional
        The radial cut-off.

    radial_nodes : int, optional
        Gauss--Legendre nodes per radial piece.
    """

    def __init__(self, density, bump=None, radial_nodes=48):
        self.density = density
        self.bump = BumpProfile() if bump is None else bump
        self.n, self.m = density.n, density.m
        self.real = density.real

        lo, hi = self.bump.support
        a = self.bump.a
        t, w = np.polynomial.legendre.leggauss(radial_nodes)
        s, ws = [], []
        for left, right in [(lo, 1 - a), (1 - a, 1 + a), (1 + a, hi)]:
            s.append(left + (right - left) * (t + 1) / 2)
            ws.append((right - left) * w / 2)
        self._s = np.concatenate(s)
        self._ws = np.concatenate(ws) * self._s ** (self.n - 1) * self.bump(self._s) / (2 * np.pi) ** self.n
        self._rules = {}
        self.tail_estimate = None

    def _rule(self, degree):
        if degree not in self._rules:
            nodes, wf = self.density._rule(degree)
            xi = (self._s[:, None, None] * nodes[None, :, :]).reshape(-1, self.n)
            w = (self._ws[:, None, None] * wf[None, :, :]).reshape(-1, self.m)
            self._rules[degree] = (xi, w)
        return self._rules[degree]

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if len(x) == 0:
            return np.zeros((0, self.m), dtype=complex)
        radius = self.bump.support[1] * float(np.linalg.norm(x, axis=1).max())
        xi, w = self._rule(self.density.required_degree(radius))
        out = np.empty((len(x), self.m), dtype=complex)
        for start in range(0, len(x), 256):
            out[start:start + 256] = np.exp(1j * x[start:start + 256] @ xi.T) @ w
        return out

    def extension(self, xi):
        "The extended density :math:`g(\\xi)`, zero off the annulus, at points of shape ``(P, n)``."
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        r = np.linalg.norm(xi, axis=1)
        chi = self.bump(r)
        out = np.zeros((len(xi), self.m), dtype=complex)
        live = chi > 0
        if np.any(live):
            out[live] = chi[live, None] * self.density.density(xi[live] / r[live, None])
        return out

    def on_grid(self, extent, step=0.25):
        """
        Sample :math:`\\hat g` on the centred grid of spacing ``step`` covering ``[-extent, extent]`` per axis by FFT.

        Returns
        -------
        values : array
            Shape ``(M,)*n + (m,)``.

        x : list of arrays
            The grid co-ordinates along each axis.
        """
        half = np.pi / step
        if half < self.bump.support[1]:
            raise ValueError("step is too coarse to resolve the support of g")
        M = 2 * int(np.ceil(extent / step))
        Lk = 2 * half
        k = dft.grid_coords(M, Lk / M)
        mesh = np.stack(np.meshgrid(*([k] * self.n), indexing='ij'), axis=-1).reshape(-1, self.n)
        g = self.extension(mesh).reshape((M,) * self.n + (self.m,))
        values, x = dft.ifft(g, Lk, a=1, b=1, axes=list(range(self.n)))
        return values, x

    def tail_profile(self, radii, extent=None, step=0.25):
        r"""
        :math:`L^1` mass :math:`\int_{|x|>R}|\hat g|dx` for each ``R`` in ``radii`` (max over components).

        The grid reaches ``extent`` (default ``4 * max(radii)``) with the spacing given by :meth:`tail_step`; shell
        sums are taken with :func:`eigenloc.analysis.radial_sum`.
        """
        from .analysis import radial_sum

        radii = np.atleast_1d(np.asarray(radii, dtype=float))
        extent = 4 * radii.max() if extent is None else extent
        step = self.tail_step(extent, step)
        values, x = self.on_grid(extent, step)
        cell = step ** self.n
        edges = np.concatenate([[0], np.sort(radii), [np.sqrt(self.n) * (extent + step)]])
        tails = []
        for j in range(self.m):
            shells, _ = radial_sum(np.abs(values[..., j]) * cell, x, bins=edges)
            outside = np.cumsum(shells[::-1])[::-1]
            tails.append(outside[1:])
        tails = np.max(tails, axis=0)
        return tails[np.argsort(np.argsort(radii))]

    def tail_step(self, extent, step=0.25):
        """
        The grid spacing actually used for a tail profile reaching ``extent``.

        It is ``step`` unless the grid would exceed :data:`MAX_TAIL_POINTS` nodes, in which case it is widened
        until the grid fits. The widened step still resolves the support of the extension.
        """
        side = int(MAX_TAIL_POINTS ** (1. / self.n) + 1e-9) // 2
        if np.ceil(extent / step) <= side:
            return step
        wide = extent / (side - 1)
        if np.pi / wide < self.bump.support[1]:
            raise ValueError("extent %s is too large for a tail profile of at most %s nodes"
                             % (extent, MAX_TAIL_POINTS))
        logger.info("tail profile: step widened from %s to %.4f to keep the grid below %s nodes", step, wide,
                    MAX_TAIL_POINTS)
        return wide

    def tail(self, R, extent=None, step=0.25):
        "The :math:`L^1` tail of :math:`\\hat g` outside :math:`B_R`."
        return float(self.tail_profile([R], extent=extent, step=step)[0])


def extend_and_transform(f2, bump=None, radial_nodes=48, R=None, tail_tol=None, step=0.25):
    """
    Bump-extend a density and prepare its Fourier transform for sampling.

    Parameters
    ----------
    f2 : :class:`~eigenloc.waves.HerglotzDensity`
        Density on :math:`S^{n-1}` (``n`` in {2, 3}).

    bump : :class:`BumpProfile`, optional
        Radial cut-off; the default has ``a = 1/4, b = 1/2``.

    radial_nodes : int, optional
        Radial quadrature resolution.

    R : float, optional
        If given, the tail mass outside :math:`B_R` is estimated and stored as ``tail_estimate``.

    tail_tol : float, optional
        If given together with ``R``, raise :class:`TailBoundError` when the estimated tail exceeds it.

    step : float, optional
        Grid step used for the tail estimate.

    Returns
    -------
    :class:`FourierSamples`
    """
    if f2.n not in (2, 3):
        raise ValueError("the Fourier pipeline supports n in {2, 3}")
    samples = FourierSamples(f2, bump, radial_nodes)
    if R is not None:
        samples.tail_estimate = samples.tail(R, step=step)
        logger.info("L1 tail of g-hat outside B_%s: %.3e", R, samples.tail_estimate)
        if tail_tol is not None and samples.tail_estimate > tail_tol:
            raise TailBoundError("tail mass %.3e outside B_%s exceeds %.3e; increase R"
                                 % (samples.tail_estimate, R, tail_tol))
    return samples


def discretize_fourier(samples, R, delta2, choice="center", max_cells=MAX_CELLS):
    r"""
    Riemann-sum discretization of :math:`\hat g` over a cover of :math:`B_R`.

    Parameters
    ----------
    samples : callable
        Evaluates :math:`\hat g` at points ``(P, n)``, e.g. a :class:`FourierSamples`.

    R : float
        Truncation radius.

    delta2 : float
        Cell diameter bound.

    choice : {"center", "corner"}
        Representative point of each cell.

    Returns
    -------
    :class:`~eigenloc.waves.BesselSum`
        Terms :math:`c_j = (2\pi)^{n/2}\hat g(x_j)|U_j|`; exactly vanishing terms are dropped.
    """
    cover = BallCellCover(samples.n, R, delta2, max_cells=max_cells)
    points = cover.points(choice)
    values = samples(points)
    if getattr(samples, "real", False):
        values = values.real
    coefficients = (2 * np.pi) ** (samples.n / 2.) * values * cover.volumes[:, None]
    keep = np.any(coefficients != 0, axis=1)
    logger.info("discretized g-hat on %s ball cells (%s nonzero)", len(cover), keep.sum())
    return BesselSum(coefficients[keep], points[keep], radius=R, n=samples.n)


def approximate_bessel(target, R, delta2, n=None, L=12, bump=None, radial_nodes=48, choice="center",
                       tail_tol=None):
    """
    Approximate a monochromatic wave on the unit ball by a finite sum of shifted Bessel kernels.

    The chain is: harmonic expansion of the target (skipped if it already is a
    :class:`~eigenloc.waves.HarmonicExpansion`), its Herglotz density, the bump extension and its Fourier transform,
    and the ball-cover discretization.

    Parameters
    ----------
    target : callable or :class:`~eigenloc.waves.HarmonicExpansion`
        The wave.

    R, delta2 : float
        Truncation radius and cell diameter of the Fourier discretization.

    n : int, optional
        Dimension; taken from ``target.n`` if not given.

    L : int, optional
        Harmonic truncation degree.

    Returns
    -------
    bessel : :class:`~eigenloc.waves.BesselSum`
        The approximation.

    report : dict
        ``truncation_error`` of the expansion, ``tail`` (if ``tail_tol`` was given) and the number of terms.
    """
    n = getattr(target, "n", None) if n is None else n
    if n is None:
        raise ValueError("the dimension n of the target must be given")
    expansion = target if isinstance(target, HarmonicExpansion) else expand_wave(target, n, L)
    density = expansion_to_density(expansion)
    samples = extend_and_transform(density, bump, radial_nodes, R=R if tail_tol is not None else None,
                                   tail_tol=tail_tol)
    bessel = discretize_fourier(samples, R, delta2, choice=choice)
    report = {"truncation_error": expansion.truncation_error, "tail": samples.tail_estimate, "terms": len(bessel),
              "R": R, "delta2": delta2, "L": expansion.L}
    return bessel, report
