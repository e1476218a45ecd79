"""
Eigenfunctions of the Laplacian on the flat torus :math:`\\mathbb{T}^n=\\mathbb{R}^n/2\\pi\\mathbb{Z}^n`.

A function :math:`\\psi(x)=\\sum_k \\hat c_k e^{ik\\cdot x}` with every :math:`k\\in\\mathbb{Z}^n` on the lattice
sphere :math:`|k|=N` satisfies :math:`\\Delta\\psi+N^2\\psi=0` exactly. If the frequencies are :math:`k=N\\xi_k` for
directions :math:`\\xi_k` taken one per cell of a cap cover, then
:math:`\\psi(x/N)=\\sum_k \\hat c_k e^{i\\xi_k\\cdot x}` is exactly a discretized Herglotz integral, so the whole
localization error is the discretization error of the cover.

For ``n = 2`` the lattice directions are not equidistributed, so only some degrees ``N`` admit a direction in every
cell (see :func:`search_torus2`).
"""
import logging
import warnings

import numpy as np

from .waves import PlaneWaveSum

logger = logging.getLogger(__name__)

__all__ = ['LatticeSphere', 'CapAssignment', 'TorusEigenfunction', 'FlatChart', 'EmptyCellError', 'enumerate_lattice',
           'assign_caps', 'hermitian_symmetrize', 'synthesize_torus', 'eval_torus', 'admissible_degrees',
           'first_admissible', 'search_torus2', 'cap_statistics']

#: Largest N enumerated by default, per dimension.
LATTICE_CAP = {2: 10 ** 6, 3: 2000, 4: 300}


class EmptyCellError(ArithmeticError):
    """
    Some cell of the cover contains no lattice direction.

    The partial :class:`CapAssignment` is available as ``assignment``.
    """

    def __init__(self, message, assignment=None):
        super(EmptyCellError, self).__init__(message)
        self.assignment = assignment


def _isqrt(v):
    s = np.floor(np.sqrt(v)).astype(np.int64)
    s += ((s + 1) ** 2 <= v).astype(np.int64)
    s -= (s ** 2 > v).astype(np.int64)
    return s


def _expand(prefix, rem):
    "Append every integer k with k**2 <= rem to each prefix row."
    bound = _isqrt(rem)
    lengths = 2 * bound + 1
    rows = np.repeat(np.arange(len(prefix)), lengths)
    starts = np.repeat(np.cumsum(lengths) - lengths, lengths)
    k = np.arange(lengths.sum()) - starts - bound[rows]
    return np.column_stack([prefix[rows], k]), rem[rows] - k ** 2


class LatticeSphere(object):
    """
    The integer points :math:`k\\in\\mathbb{Z}^n` with :math:`|k|^2=N^2`, in lexicographic order.

    Attributes
    ----------
    points : array of int64
        Shape ``(K, n)``.
    """

    def __init__(self, N, n, points):
        self.N, self.n = int(N), int(n)
        self.points = np.asarray(points, dtype=np.int64).reshape(-1, n)
        if np.any(np.sum(self.points ** 2, axis=1) != self.N ** 2):
            raise ValueError("every lattice point must satisfy |k|^2 = N^2")

    def __len__(self):
        return len(self.points)

    @property
    def directions(self):
        "The unit vectors :math:`k/N`."
        return self.points / float(self.N)

    @property
    def symmetric(self):
        "Whether the point set is closed under :math:`k\\to-k`."
        return set(map(tuple, self.points)) == set(map(tuple, -self.points))


def enumerate_lattice(N, n, cap=None):
    """
    All integer solutions of :math:`k_1^2+\\dots+k_n^2=N^2`.

    The loop runs over :math:`k_1`; the middle coordinates are expanded vectorially and the last one is recovered by an
    integer square root, so all arithmetic is exact.

    Parameters
    ----------
    N : int
        Radius, ``N >= 1``.

    n : int
        Dimension, 2, 3 or 4.

    cap : int, optional
        Largest ``N`` accepted. Defaults to :data:`LATTICE_CAP`.

    Returns
    -------
    :class:`LatticeSphere`
    """
    if n not in (2, 3, 4):
        raise ValueError("lattice enumeration supports n in {2, 3, 4}")
    if N < 1 or int(N) != N:
        raise ValueError("N must be a positive integer")
    cap = LATTICE_CAP[n] if cap is None else cap
    if N > cap:
        raise ValueError("N=%s is over the enumeration cap %s for n=%s" % (N, cap, n))
    N = int(N)

    found = []
    for k1 in range(-N, N + 1):
        prefix = np.array([[k1]], dtype=np.int64)
        rem = np.array([N * N - k1 * k1], dtype=np.int64)
        for _ in range(n - 2):
            prefix, rem = _expand(prefix, rem)
        last = _isqrt(rem)
        hit = last ** 2 == rem
        prefix, last = prefix[hit], last[hit]
        found.append(np.column_stack([prefix, last]))
        pos = last > 0
        found.append(np.column_stack([prefix[pos], -last[pos]]))

    points = np.concatenate(found)
    points = points[np.lexsort(points.T[::-1])]
    logger.debug("lattice sphere N=%s, n=%s has %s points", N, n, len(points))
    return LatticeSphere(N, n, points)


class CapAssignment(object):
    """
    One lattice direction per cell of a cap cover.

    Attributes
    ----------
    indices : array of int
        For each cell, the index of the chosen lattice point, or ``-1`` for an empty cell.

    empty_cells : array of int
        Indices of the cells without lattice directions.
    """

    def __init__(self, cover, lattice, indices):
        self.cover = cover
        self.lattice = lattice
        self.indices = np.asarray(indices, dtype=int)

    @property
    def empty_cells(self):
        return np.flatnonzero(self.indices < 0)

    @property
    def complete(self):
        return len(self.empty_cells) == 0

    @property
    def vectors(self):
        "Chosen lattice points of the non-empty cells, shape ``(C', n)``."
        return self.lattice.points[self.indices[self.indices >= 0]]

    @property
    def directions(self):
        return self.vectors / float(self.lattice.N)

    def pairs(self):
        "List of ``(cell index, direction)`` for the assigned cells."
        cells = np.flatnonzero(self.indices >= 0)
        return list(zip(cells.tolist(), self.directions))


def assign_caps(cover, lattice, choice="center", partial=False):
    """
    Pick, for each cell of ``cover``, a lattice direction :math:`k/N` lying in it.

    Among several candidates the one closest to the cell's representative point (see
    :meth:`~eigenloc.herglotz.SphericalCapCover.points`) is chosen.

    Parameters
    ----------
    cover : :class:`~eigenloc.herglotz.SphericalCapCover`
        The cover.

    lattice : :class:`LatticeSphere`
        Candidate directions.

    choice : {"center", "corner"}
        Representative point to snap towards.

    partial : bool, optional
        Return an incomplete assignment instead of raising.

    Raises
    ------
    EmptyCellError
        If some cell holds no lattice direction and ``partial`` is False.
    """
    if cover.n != lattice.n:
        raise ValueError("cover of S^%s does not match a lattice in Z^%s" % (cover.n - 1, lattice.n))
    directions = lattice.directions
    cells = cover.locate(directions)
    reference = cover.points(choice)

    indices = np.full(len(cover), -1, dtype=int)
    inside = np.flatnonzero(cells >= 0)
    if len(inside):
        closeness = np.sum(directions[inside] * reference[cells[inside]], axis=1)
        order = np.lexsort((-closeness, cells[inside]))
        ordered_cells = cells[inside][order]
        first = np.flatnonzero(np.r_[True, ordered_cells[1:] != ordered_cells[:-1]])
        indices[ordered_cells[first]] = inside[order][first]

    assignment = CapAssignment(cover, lattice, indices)
    if not assignment.complete and not partial:
        raise EmptyCellError("%s of %s cells contain no direction k/N with |k| = %s"
                             % (len(assignment.empty_cells), len(cover), lattice.N), assignment)
    return assignment


def hermitian_symmetrize(vectors, coefficients):
    r"""
    Complete a mode list to a Hermitian symmetric one.

    A mode :math:`(k, c)` whose opposite frequency is missing gains the partner :math:`(-k, \bar c)`, so the single
    wave :math:`c\,e^{ik\cdot x}` becomes :math:`2\,\mathrm{Re}(c\,e^{ik\cdot x})`. Where both :math:`k` and
    :math:`-k` are present, each gets :math:`(\hat c_k+\overline{\hat c_{-k}})/2`, which leaves an already Hermitian
    list unchanged. The result satisfies :math:`\hat c_{-k}=\overline{\hat c_k}`.

    Returns
    -------
    vectors : array of int64
        Lexicographically sorted frequencies.

    coefficients : array
        Merged complex coefficients, shape ``(K', m)``.
    """
    vectors = np.asarray(vectors, dtype=np.int64)
    coefficients = np.asarray(coefficients, dtype=complex)
    if coefficients.ndim == 1:
        coefficients = coefficients[:, None]
    present = set(map(tuple, vectors.tolist()))
    paired = np.array([tuple(-i for i in k) in present for k in vectors.tolist()], dtype=bool)
    weight = np.where(paired, 0.5, 1.)[:, None]
    both = np.concatenate([vectors, -vectors])
    values = np.concatenate([weight * coefficients, weight * np.conj(coefficients)])
    unique, inverse = np.unique(both, axis=0, return_inverse=True)
    merged = np.zeros((len(unique), coefficients.shape[1]), dtype=complex)
    np.add.at(merged, inverse.ravel(), values)
    return unique, merged


class FlatChart(object):
    """
    The identity chart of :math:`\\mathbb{T}^n` at the origin, with :math:`2\\pi`-periodic co-ordinates.
    """

    def __init__(self, n):
        self.n = n

    def __call__(self, x):
        "Chart point to torus point in :math:`[0, 2\\pi)^n`."
        return np.mod(np.asarray(x, dtype=float), 2 * np.pi)

    def inverse(self, p):
        "Torus point to its representative in :math:`[-\\pi, \\pi)^n`."
        return np.mod(np.asarray(p, dtype=float) + np.pi, 2 * np.pi) - np.pi


class TorusEigenfunction(object):
    r"""
    A finite Fourier series on :math:`\mathbb{T}^n` supported on the lattice sphere :math:`|k|=N`.

    Parameters
    ----------
    N, n : int
        Radius and dimension.

    vectors : array of int
        Shape ``(K, n)``, every row with :math:`|k|^2=N^2`.

    coefficients : array
        Shape ``(K, m)`` (or ``(K,)``), complex.

    real : bool, optional
        Whether the modes are Hermitian symmetric, so that the function is real.
    """

    def __init__(self, N, n, vectors, coefficients, real=False, m=None):
        self.N, self.n = int(N), int(n)
        self.vectors = np.asarray(vectors, dtype=np.int64).reshape(-1, n)
        coefficients = np.asarray(coefficients, dtype=complex)
        if coefficients.size == 0:
            coefficients = coefficients.reshape(0, m or (coefficients.shape[1] if coefficients.ndim == 2 else 1))
        elif coefficients.ndim == 1:
            coefficients = coefficients[:, None]
        if len(coefficients) != len(self.vectors):
            raise ValueError("need one coefficient row per frequency")
        if np.any(np.sum(self.vectors ** 2, axis=1) != self.N ** 2):
            raise ValueError("every frequency must satisfy |k|^2 = N^2")
        self.coefficients = coefficients
        self.m = coefficients.shape[1]
        self.real = real
        if real and not self.hermitian:
            raise ValueError("modes flagged real are not Hermitian symmetric")

    def __len__(self):
        return len(self.vectors)

    @property
    def eigenvalue(self):
        return self.N ** 2

    @property
    def hermitian(self):
        "Whether :math:`\\hat c_{-k}=\\overline{\\hat c_k}` holds for every mode."
        table = {tuple(k): c for k, c in zip(self.vectors.tolist(), self.coefficients)}
        for k, c in table.items():
            other = table.get(tuple(-i for i in k))
            if other is None or not np.allclose(other, np.conj(c), rtol=0, atol=1e-14 * (1 + np.abs(c).max())):
                return False
        return True

    def __call__(self, x):
        return eval_torus(self, x)

    def laplacian(self, x):
        "Analytic Laplacian, mode by mode."
        x = np.atleast_2d(np.asarray(x, dtype=float))
        norms = np.sum(self.vectors ** 2, axis=1).astype(float)
        return np.exp(1j * x @ self.vectors.T) @ (-norms[:, None] * self.coefficients)

    def plane_wave_sum(self):
        "The plane-wave sum :math:`\\sum_k\\hat c_k e^{i(k/N)\\cdot x}`, which equals :math:`\\psi(x/N)`."
        return PlaneWaveSum(self.coefficients, self.vectors / float(self.N), n=self.n)

    def rescaled(self, chart=None):
        r"The function :math:`x\mapsto\psi(x/N)` in the flat chart."
        chart = FlatChart(self.n) if chart is None else chart

        def field(x):
            return self(chart(np.asarray(x, dtype=float) / self.N))

        return field


def eval_torus(psi, x):
    """
    Evaluate a :class:`TorusEigenfunction` at points of shape ``(P, n)``.

    Returns
    -------
    array
        Complex, shape ``(P, m)``. The imaginary part vanishes to rounding when ``psi.real`` is set.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[-1] != psi.n:
        raise ValueError("points must have trailing dimension %s" % psi.n)
    out = np.empty((len(x), psi.m), dtype=complex)
    for start in range(0, len(x), 4096):
        out[start:start + 4096] = np.exp(1j * x[start:start + 4096] @ psi.vectors.T) @ psi.coefficients
    return out


def _check_parity(N, n, allow_even):
    if N % 2:
        return
    if n == 3 and not allow_even:
        raise ValueError("even N=%s is rejected on T^3; pass allow_even=True to override" % N)
    if n >= 4:
        warnings.warn("even N=%s on T^%s: the parity condition is dropped for n >= 4" % (N, n))


def synthesize_torus(density, cover, N, choice="center", symmetrize=None, allow_even=False, lattice=None):
    r"""
    The eigenfunction of eigenvalue :math:`N^2` whose rescaling discretizes the Herglotz integral of ``density``.

    Each cell gets a lattice direction :math:`\xi_k\in U_k` (:func:`assign_caps`) and the mode
    :math:`(N\xi_k, f(\xi_k)|U_k|)`.

    Parameters
    ----------
    density : :class:`~eigenloc.waves.HerglotzDensity`
        Anything with ``n`` and a ``density`` method.

    cover : :class:`~eigenloc.herglotz.SphericalCapCover`
        Cap cover of the same dimension.

    N : int
        Degree; odd unless ``allow_even`` (``n = 3``) or with a warning (``n >= 4``).

    choice : {"center", "corner"}
        Representative point the lattice directions are snapped towards.

    symmetrize : bool, optional
        Whether to complete the modes Hermitian symmetrically (:func:`hermitian_symmetrize`). Defaults to
        ``density.real``.

    lattice : :class:`LatticeSphere`, optional
        A precomputed lattice sphere of radius ``N``.

    Raises
    ------
    EmptyCellError
        If some cell has no lattice direction.
    """
    n = cover.n
    if density.n != n:
        raise ValueError("density on S^%s does not match a cover of S^%s" % (density.n - 1, n - 1))
    _check_parity(N, n, allow_even)
    lattice = enumerate_lattice(N, n) if lattice is None else lattice

    assignment = assign_caps(cover, lattice, choice=choice)
    xi = assignment.directions
    coefficients = density.density(xi) * cover.areas[:, None]
    vectors = assignment.vectors

    symmetrize = getattr(density, "real", False) if symmetrize is None else symmetrize
    if symmetrize:
        vectors, coefficients = hermitian_symmetrize(vectors, coefficients)
    logger.info("torus eigenfunction N=%s on T^%s: %s modes", N, n, len(vectors))
    return TorusEigenfunction(N, n, vectors, coefficients, real=bool(symmetrize))


def _degrees(N_values):
    if isinstance(N_values, tuple) and len(N_values) == 2:
        return range(int(N_values[0]), int(N_values[1]) + 1)
    return N_values


def admissible_degrees(cover, N_values, choice="center"):
    """
    The degrees ``N`` for which every cell of ``cover`` contains a lattice direction.

    Parameters
    ----------
    cover : :class:`~eigenloc.herglotz.SphericalCapCover`
        The cover.

    N_values : iterable of int, or (lo, hi) tuple
        Degrees to test; a 2-tuple is the inclusive range.

    Returns
    -------
    list of int
        In the order tested.
    """
    out = []
    for N in _degrees(N_values):
        assignment = assign_caps(cover, enumerate_lattice(N, cover.n), choice=choice, partial=True)
        if assignment.complete:
            out.append(int(N))
        else:
            logger.debug("N=%s: %s empty cells", N, len(assignment.empty_cells))
    return out


def first_admissible(cover, N_values, choice="center"):
    "The first admissible degree in ``N_values``, or ``None``."
    for N in _degrees(N_values):
        if assign_caps(cover, enumerate_lattice(N, cover.n), choice=choice, partial=True).complete:
            return int(N)
    return None


def search_torus2(N_range, cover):
    """
    Admissible degrees on :math:`\\mathbb{T}^2`.

    Parameters
    ----------
    N_range : (lo, hi) tuple or iterable of int
        Degrees to test; a 2-tuple is the inclusive range.

    cover : :class:`~eigenloc.herglotz.SphericalCapCover`
        A cover of :math:`S^1`.

    Returns
    -------
    list of int
        Possibly empty.
    """
    if cover.n != 2:
        raise ValueError("search_torus2 needs a cover of S^1")
    return admissible_degrees(cover, N_range)


def cap_statistics(cover, lattice):
    """
    Lattice directions per cell against the count expected from equidistribution.

    Returns
    -------
    counts : array of int
        Directions in each cell.

    expected : array
        ``len(lattice) * area / total_area`` for each cell.
    """
    cells = cover.locate(lattice.directions)
    counts = np.bincount(cells[cells >= 0], minlength=len(cover))
    expected = len(lattice) * cover.areas / cover.total_area
    return counts, expected
