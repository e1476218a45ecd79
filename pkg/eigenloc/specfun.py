r"""
Special functions used throughout :mod:`eigenloc`.

Everything the localization formulas need lives here: Bessel functions of the first kind and the radial kernel
:math:`J_{n/2-1}(r)/r^{n/2-1}`, symmetric Jacobi polynomials, the ultraspherical kernel normalised so that
:math:`C^n_N(1)=1`, real spherical harmonics on :math:`S^1` and :math:`S^2`, and simple product quadratures on those
spheres.

Conventions
-----------
The ambient dimension is always called ``n`` and the polynomial degree ``N``. The Jacobi parameter tied to the
dimension is :math:`\alpha = n/2 - 1`, so that

.. math:: C^n_N(t) = \frac{\Gamma(N+1)\Gamma(n/2)}{\Gamma(N+n/2)} P_N^{(\alpha,\alpha)}(t),

which is the degree-:math:`N` zonal eigenfunction on :math:`S^n` with eigenvalue :math:`N(N+n-1)`.

The hyperspherical Bessel function is normalised as :math:`j_l(r) = J_{l+n/2-1}(r)/r^{n/2-1}`, so that

.. math:: \int_{S^{n-1}} e^{i x\cdot\xi} Y_{lk}(\xi) d\sigma(\xi) = (2\pi)^{n/2} i^l j_l(|x|) Y_{lk}(x/|x|).

All functions are pure and vectorised over their real arguments.
"""
import numpy as np
from scipy import special

__all__ = ['bessel_j', 'bessel_kernel', 'bessel_kernel_limit', 'hyperspherical_bessel', 'jacobi_poly',
           'gegenbauer_scale', 'gegenbauer_norm', 'gegenbauer_norm_deriv', 'mehler_heine_pair', 'multiplicity',
           'num_harmonics', 'sph_harmonic', 'harmonic_basis', 'harmonic_index', 'sphere_quadrature', 'sphere_area',
           'to_angles', 'from_angles']

# Below this the kernel is evaluated from its two-term series.
_SMALL_R = 1e-6


def _check_order(nu):
    if nu < 0 or not np.isclose(2 * nu, np.round(2 * nu)):
        raise ValueError("Bessel order must be a non-negative integer or half-integer, got %s" % nu)


def bessel_j(nu, t):
    """
    Bessel function of the first kind for integer and half-integer orders.

    Parameters
    ----------
    nu : float
        The order; an integer or half-integer ``>= 0`` (orders ``n/2 - 1`` and ``l + n/2 - 1`` are what the package
        needs).

    t : float or array
        Non-negative argument(s).

    Returns
    -------
    float or array
        :math:`J_\\nu(t)`.
    """
    _check_order(nu)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("bessel_j is only defined here for t >= 0")
    return special.jv(nu, t)


def bessel_kernel_limit(n):
    "The value of :func:`bessel_kernel` at ``r=0``, namely :math:`1/(2^{n/2-1}\\Gamma(n/2))`."
    return np.exp(-(n / 2. - 1) * np.log(2.) - special.gammaln(n / 2.))


def bessel_kernel(n, r):
    r"""
    The radial kernel :math:`J_{n/2-1}(r)/r^{n/2-1}` of monochromatic waves in :math:`\mathbb{R}^n`.

    The removable singularity at the origin is filled with its series, so the function is smooth in ``r``.

    Parameters
    ----------
    n : int
        Ambient dimension, ``n >= 2``.

    r : float or array
        Non-negative radii.

    Returns
    -------
    float or array
        Kernel values, same shape as ``r``.

    Examples
    --------
    >>> bessel_kernel(3, 0.)   # sqrt(2/pi)
    0.7978845608028654
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("bessel_kernel requires r >= 0")

    nu = n / 2. - 1
    c0 = bessel_kernel_limit(n)
    small = r < _SMALL_R
    out = np.empty_like(r)
    # two terms of the series
    out[small] = c0 * (1 - r[small] ** 2 / (4 * (nu + 1)))
    rs = r[~small]
    out[~small] = special.jv(nu, rs) / rs ** nu
    return out[()] if out.ndim == 0 else out


def hyperspherical_bessel(l, n, r):
    r"""
    Radial function :math:`j_l(r) = J_{l+n/2-1}(r)/r^{n/2-1}` paired with degree-``l`` harmonics on
    :math:`S^{n-1}`.

    For ``l = 0`` this is :func:`bessel_kernel`; for ``l > 0`` it vanishes at the origin.
    """
    if l == 0:
        return bessel_kernel(n, r)
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("hyperspherical_bessel requires r >= 0")
    nu = n / 2. - 1
    safe = np.where(r > 0, r, 1.)
    out = np.where(r > 0, special.jv(l + nu, safe) / safe ** nu, 0.)
    return out[()] if out.ndim == 0 else out


def _check_interval(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1 + 1e-12):
        raise ValueError("argument must lie in [-1, 1]")
    return np.clip(t, -1, 1)


def jacobi_poly(N, alpha, t):
    r"""
    Symmetric Jacobi polynomial :math:`P_N^{(\alpha,\alpha)}(t)` by the three-term recurrence in ``N``.

    With :math:`\alpha=\beta` the general Jacobi recurrence reduces to

    .. math:: (k+1)(k+2\alpha+1)P_{k+1} = (k+\alpha+1)\left[(2k+2\alpha+1)\,t\,P_k - (k+\alpha)P_{k-1}\right].

    Degrees above 300 are run in extended precision, since the endpoint value
    :math:`\binom{N+\alpha}{N}` amplifies rounding.

    Parameters
    ----------
    N : int
        Degree, ``N >= 0``.

    alpha : float
        Parameter, ``alpha > -1``.

    t : float or array
        Argument(s) in ``[-1, 1]``.

    Returns
    -------
    float or array
    """
    if N < 0 or int(N) != N:
        raise ValueError("N must be a non-negative integer")
    if alpha <= -1:
        raise ValueError("alpha must be > -1")
    N = int(N)
    t = _check_interval(t)

    dtype = np.longdouble if N > 300 else float
    t = t.astype(dtype)
    p_prev = np.ones_like(t)
    if N == 0:
        return _as_output(p_prev)

    p = (alpha + 1) * t
    for k in range(1, N):
        p_next = (k + alpha + 1) * ((2 * k + 2 * alpha + 1) * t * p - (k + alpha) * p_prev)
        p_next /= (k + 1) * (k + 2 * alpha + 1)
        p_prev, p = p, p_next

    return _as_output(p)


def _as_output(x):
    x = np.asarray(x, dtype=float)
    return x[()] if x.ndim == 0 else x


def gegenbauer_scale(N, n):
    r"""
    The normalising ratio :math:`\Gamma(N+1)\Gamma(n/2)/\Gamma(N+n/2)`, computed in log space.
    """
    return np.exp(special.gammaln(N + 1) + special.gammaln(n / 2.) - special.gammaln(N + n / 2.))


def gegenbauer_norm(N, n, t):
    r"""
    Ultraspherical kernel on :math:`S^n`, normalised so that :math:`C^n_N(1) = 1`.

    Parameters
    ----------
    N : int
        Degree.

    n : int
        Dimension of the sphere :math:`S^n`, ``n >= 2``.

    t : float or array
        Cosine of the geodesic distance, in ``[-1, 1]``.

    Returns
    -------
    float or array
        :math:`C^n_N(t)`; bounded by 1 in absolute value and of parity :math:`(-1)^N`.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    return gegenbauer_scale(N, n) * jacobi_poly(N, n / 2. - 1, t)


def gegenbauer_norm_deriv(N, n, t, order=1):
    r"""
    Derivatives in ``t`` of :func:`gegenbauer_norm`.

    Uses :math:`\frac{d}{dt}C^n_N = \frac{N(N+n-1)}{n} C^{n+2}_{N-1}`, applied ``order`` times.

    Parameters
    ----------
    N, n : int
        Degree and sphere dimension.

    t : float or array
        Argument(s) in ``[-1, 1]``.

    order : int, optional
        Derivative order, 0, 1 or 2.
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    factor = 1.
    for _ in range(order):
        if N == 0:
            return _as_output(np.zeros_like(_check_interval(t)))
        factor *= N * (N + n - 1) / float(n)
        N, n = N - 1, n + 2
    return factor * gegenbauer_norm(N, n, t)


def mehler_heine_pair(N, n, t):
    r"""
    Both sides of the Mehler--Heine limit for symmetric Jacobi polynomials.

    .. math:: N^{1-n/2} P_N^{(n/2-1,n/2-1)}(\cos(t/N)) \to 2^{n/2-1} J_{n/2-1}(t)/t^{n/2-1}.

    Parameters
    ----------
    N : int
        Degree, ``N >= 1``.

    n : int
        Dimension, ``n >= 2``.

    t : float or array
        Non-negative scaled angle(s).

    Returns
    -------
    lhs, rhs : float or array
        The rescaled Jacobi polynomial and its Bessel limit, for convergence testing.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    alpha = n / 2. - 1
    lhs = N ** (-alpha) * jacobi_poly(N, alpha, np.cos(t / N))
    rhs = 2 ** alpha * bessel_kernel(n, t)
    return lhs, rhs


def multiplicity(N, n):
    """
    Dimension of the eigenspace of degree ``N`` on :math:`S^n`, as an exact integer.

    Computed as :math:`\\binom{N+n-1}{N}(2N+n-1)/(N+n-1)`; for ``N = 0`` this is 1.
    """
    if N < 0 or n < 1:
        raise ValueError("need N >= 0 and n >= 1")
    if N == 0:
        return 1
    num = special.comb(N + n - 1, N, exact=True) * (2 * N + n - 1)
    den = N + n - 1
    if num % den:
        raise ArithmeticError("multiplicity formula is not integral for N=%s, n=%s" % (N, n))
    return num // den


def num_harmonics(l, n):
    "Number of degree-``l`` spherical harmonics on :math:`S^{n-1}` (``n`` in {2, 3})."
    _check_harmonic_dim(n)
    if n == 2:
        return 1 if l == 0 else 2
    return 2 * l + 1


def _check_harmonic_dim(n):
    if n not in (2, 3):
        raise ValueError("explicit spherical harmonics are only provided on S^1 and S^2 (n in {2, 3}), got n=%s" % n)


def harmonic_index(n, L):
    """
    The ``(l, k)`` labels of every harmonic up to degree ``L``, in the column order of :func:`harmonic_basis`.

    ``k`` runs from 1 to ``num_harmonics(l, n)``.
    """
    return [(l, k) for l in range(L + 1) for k in range(1, num_harmonics(l, n) + 1)]


def to_angles(xi):
    r"""
    Hyperspherical angles of unit vectors in :math:`\mathbb{R}^n`.

    The angles are :math:`(\theta_1, \dots, \theta_{n-2}, \varphi)` with :math:`\theta_i\in[0,\pi]`,
    :math:`\varphi\in[0,2\pi)`, matching :func:`from_angles`: :math:`\xi_n=\cos\theta_1`,
    :math:`\xi_{n-1}=\sin\theta_1\cos\theta_2`, ..., :math:`\xi_1 = \prod\sin\theta_i\cos\varphi`,
    :math:`\xi_2=\prod\sin\theta_i\sin\varphi`. On :math:`S^2` this is the usual polar/azimuth pair about the
    third axis.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    n = xi.shape[-1]
    angles = np.empty(xi.shape[:-1] + (n - 1,))
    for i in range(n - 2):
        last = n - 1 - i
        rho = np.sqrt(np.sum(xi[..., :last] ** 2, axis=-1))
        angles[..., i] = np.arctan2(rho, xi[..., last])
    angles[..., -1] = np.mod(np.arctan2(xi[..., 1], xi[..., 0]), 2 * np.pi)
    return angles


def from_angles(angles):
    "Inverse of :func:`to_angles`."
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    d = angles.shape[-1]
    n = d + 1
    xi = np.empty(angles.shape[:-1] + (n,))
    s = np.ones(angles.shape[:-1])
    for i in range(d - 1):
        xi[..., n - 1 - i] = s * np.cos(angles[..., i])
        s = s * np.sin(angles[..., i])
    xi[..., 0] = s * np.cos(angles[..., -1])
    xi[..., 1] = s * np.sin(angles[..., -1])
    return xi


def _check_unit(omega, tol=1e-12):
    omega = np.asarray(omega, dtype=float)
    if np.any(np.abs(np.linalg.norm(omega, axis=-1) - 1) > tol):
        raise ValueError("points must be unit vectors (to within %s)" % tol)
    return omega


def sph_harmonic(l, k, omega):
    """
    Real orthonormal spherical harmonic :math:`Y_{lk}` on :math:`S^1` or :math:`S^2`.

    On :math:`S^1` the basis is :math:`1/\\sqrt{2\\pi}` for ``l=0`` and
    :math:`\\{\\cos l\\theta, \\sin l\\theta\\}/\\sqrt{\\pi}` (``k=1, 2``) otherwise. On :math:`S^2`, ``k=1..2l+1`` maps
    to the order ``m = k - l - 1`` of the real associated-Legendre basis (cosine for ``m > 0``, sine for ``m < 0``).

    Parameters
    ----------
    l : int
        Degree.

    k : int
        Index, ``1 <= k <= num_harmonics(l, n)``.

    omega : array
        Unit vector(s) of shape ``(..., n)`` with ``n`` in {2, 3}.

    Returns
    -------
    float or array
        Values of :math:`Y_{lk}`, orthonormal with respect to the area measure.
    """
    omega = _check_unit(omega)
    n = omega.shape[-1]
    _check_harmonic_dim(n)
    if not 1 <= k <= num_harmonics(l, n):
        raise ValueError("index k=%s out of range for degree l=%s on S^%s" % (k, l, n - 1))

    if n == 2:
        theta = np.arctan2(omega[..., 1], omega[..., 0])
        if l == 0:
            out = np.full(theta.shape, 1 / np.sqrt(2 * np.pi))
        elif k == 1:
            out = np.cos(l * theta) / np.sqrt(np.pi)
        else:
            out = np.sin(l * theta) / np.sqrt(np.pi)
        return _as_output(out)

    m = k - l - 1
    am = abs(m)
    cos_theta = np.clip(omega[..., 2], -1, 1)
    phi = np.arctan2(omega[..., 1], omega[..., 0])
    norm = np.sqrt((2 * l + 1) / (4 * np.pi) * np.exp(special.gammaln(l - am + 1) - special.gammaln(l + am + 1)))
    legendre = special.lpmv(am, l, cos_theta)
    if m == 0:
        out = norm * legendre
    elif m > 0:
        out = np.sqrt(2) * norm * legendre * np.cos(am * phi)
    else:
        out = np.sqrt(2) * norm * legendre * np.sin(am * phi)
    return _as_output(out)


def harmonic_basis(n, L, omega):
    """
    Every real orthonormal harmonic of degree ``<= L`` evaluated at ``omega``.

    Returns
    -------
    basis : array
        Shape ``(P, D)`` where ``P`` is the number of points and ``D = len(harmonic_index(n, L))``.
    """
    omega = np.atleast_2d(omega)
    if omega.shape[-1] != n:
        raise ValueError("omega must have trailing dimension %s" % n)
    return np.stack([np.atleast_1d(sph_harmonic(l, k, omega)) for l, k in harmonic_index(n, L)], axis=-1)


def sphere_area(n):
    "Surface area of the unit sphere :math:`S^{n-1}\\subset\\mathbb{R}^n`."
    return 2 * np.pi ** (n / 2.) / special.gamma(n / 2.)


def sphere_quadrature(n, degree):
    """
    Product quadrature on :math:`S^{n-1}` for ``n`` in {2, 3}.

    On :math:`S^1` the rule is the trapezoid rule with ``2*degree + 2`` equispaced nodes; on :math:`S^2` it is
    Gauss--Legendre in :math:`\\cos\\theta` with ``degree + 1`` nodes times ``2*degree + 2`` equispaced azimuths. Both
    integrate every spherical harmonic of degree up to ``2*degree + 1`` exactly.

    Returns
    -------
    nodes : array
        Unit vectors, shape ``(P, n)``.

    weights : array
        Weights summing to the sphere's area, shape ``(P,)``.
    """
    _check_harmonic_dim(n)
    if degree < 0:
        raise ValueError("degree must be non-negative")
    nphi = 2 * degree + 2
    phi = 2 * np.pi * np.arange(nphi) / nphi
    if n == 2:
        nodes = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        return nodes, np.full(nphi, 2 * np.pi / nphi)

    z, wz = np.polynomial.legendre.leggauss(degree + 1)
    Z, PHI = np.meshgrid(z, phi, indexing='ij')
    s = np.sqrt(1 - Z ** 2)
    nodes = np.stack([s * np.cos(PHI), s * np.sin(PHI), Z], axis=-1).reshape(-1, 3)
    weights = (wz[:, None] * np.full(nphi, 2 * np.pi / nphi)[None, :]).ravel()
    return nodes, weights
