"""
Uniform evaluation grids and the finite-difference measurements taken on them.

An :class:`EvaluationGrid` is a centred cube of nodes with spacing ``h`` around a ball (the unit ball by default),
with a mask flagging the nodes inside the ball. Fields are sampled with :meth:`EvaluationGrid.fill`, which always
returns an array with a trailing component axis, shape ``(M,)*n + (m,)``. Derivatives use centred second-order
stencils and are ``NaN`` where the stencil leaves the grid.
"""
import itertools
import warnings

import numpy as np

__all__ = ['EvaluationGrid', 'GridTooCoarseError', 'fd_derivative', 'laplacian', 'interior_sup', 'multi_indices',
           'cr_error', 'radial_sum']

#: Minimum nodes per axis for any finite-difference measurement.
MIN_NODES = 5


class GridTooCoarseError(ValueError):
    "The grid has too few nodes (or too thin a margin) for the requested stencil."


def _magnitude_grid(x):
    return np.sqrt(np.sum(np.meshgrid(*[X ** 2 for X in x], indexing='ij'), axis=0))


class EvaluationGrid(object):
    r"""
    A uniform grid on the bounding box of a ball, with the ball as mask.

    Parameters
    ----------
    n : int
        Dimension.

    h : float
        Grid step.

    radius : float, optional
        Radius of the ball of interest.

    margin : int, optional
        Number of extra nodes beyond the ball on each side, so that stencils centred at masked nodes stay on the grid.

    Examples
    --------
    >>> grid = EvaluationGrid(3, 0.1)
    >>> values = grid.fill(lambda p: np.sin(p[:, 0]))
    >>> values.shape
    (25, 25, 25, 1)
    """

    def __init__(self, n, h, radius=1.0, margin=2):
        if not h > 0:
            raise ValueError("grid step h must be positive")
        if margin < 0:
            raise ValueError("margin must be non-negative")
        self.n = n
        self.h = float(h)
        self.radius = float(radius)
        self.margin = int(margin)

        self._half = int(np.ceil(self.radius / self.h - 1e-9)) + self.margin
        if self.N < MIN_NODES:
            raise GridTooCoarseError("grid has %s nodes per axis; at least %s are needed" % (self.N, MIN_NODES))

    @property
    def N(self):
        "Number of nodes along a side."
        return 2 * self._half + 1

    @property
    def shape(self):
        return (self.N,) * self.n

    @property
    def boxlength(self):
        "Side length of the box spanned by the nodes."
        return (self.N - 1) * self.h

    @property
    def x(self):
        "The co-ordinates of the grid along a side."
        return np.arange(-self._half, self._half + 1) * self.h

    @property
    def r(self):
        "The radial position of every node."
        return _magnitude_grid([self.x] * self.n)

    @property
    def mask(self):
        "Nodes inside the closed ball."
        return self.r <= self.radius * (1 + 1e-12)

    @property
    def points(self):
        "Every node as a row, shape ``(N**n, n)``, in C order."
        return np.stack(np.meshgrid(*([self.x] * self.n), indexing='ij'), axis=-1).reshape(-1, self.n)

    def fill(self, field):
        """
        Sample ``field`` at every node.

        Parameters
        ----------
        field : callable
            Maps points ``(P, n)`` to values ``(P,)`` or ``(P, m)``.

        Returns
        -------
        values : array
            Shape ``(N,)*n + (m,)``.
        """
        values = np.asarray(field(self.points))
        return values.reshape(self.shape + (-1,))


def _centred(values, axis, h, order):
    out = np.full(values.shape, np.nan, dtype=np.result_type(values, float))
    core = [slice(None)] * values.ndim
    up, down = list(core), list(core)
    core[axis], up[axis], down[axis] = slice(1, -1), slice(2, None), slice(None, -2)
    core, up, down = tuple(core), tuple(up), tuple(down)
    if order == 1:
        out[core] = (values[up] - values[down]) / (2 * h)
    else:
        out[core] = (values[up] - 2 * values[core] + values[down]) / h ** 2
    return out


def fd_derivative(values, alpha, h):
    """
    Centred finite-difference derivative :math:`\\partial^\\alpha` of grid values.

    Parameters
    ----------
    values : array
        Shape ``(N,)*n + (m,)``.

    alpha : tuple of int
        Multi-index of length ``n`` with entries ``<= 2`` and total order ``<= 2``.

    h : float
        Grid step.

    Returns
    -------
    array
        Same shape as ``values``; ``NaN`` where the stencil is incomplete.
    """
    if len(alpha) != values.ndim - 1:
        raise ValueError("multi-index length %s does not match the grid dimension %s" % (len(alpha), values.ndim - 1))
    if sum(alpha) > 2 or min(alpha) < 0:
        raise ValueError("only derivatives of total order <= 2 are supported, got %s" % (alpha,))
    out = values
    for axis, a in enumerate(alpha):
        if a:
            out = _centred(out, axis, h, a)
    return out


def laplacian(values, h):
    "Five-point (in 2D; ``2n+1``-point in general) discrete Laplacian of grid values."
    n = values.ndim - 1
    return sum(_centred(values, axis, h, 2) for axis in range(n))


def interior_sup(values, mask):
    "Largest finite ``|values|`` over masked nodes and all components (0 if there is none)."
    sel = np.abs(values[mask])
    sel = sel[np.isfinite(sel)]
    return float(sel.max()) if sel.size else 0.


def multi_indices(n, r):
    "All multi-indices of length ``n`` with total order ``<= r``, lowest order first."
    out = [a for a in itertools.product(range(r + 1), repeat=n) if sum(a) <= r]
    return sorted(out, key=lambda a: (sum(a), tuple(-i for i in a)))


def cr_error(target, field, grid, r=0):
    r"""
    Discrete :math:`C^r(B)` distance between two fields.

    The maximum over multi-indices :math:`|\alpha|\le r` of the sup over masked nodes of
    :math:`|\partial^\alpha_h(\phi-\tilde\psi)|`, with centred second-order stencils.

    Parameters
    ----------
    target, field : callable
        Evaluators mapping points ``(P, n)`` to values ``(P,)`` or ``(P, m)``.

    grid : :class:`EvaluationGrid`
        The grid; it needs a margin of at least one node for ``r > 0``.

    r : int, optional
        Derivative order, 0, 1 or 2.

    Returns
    -------
    float
    """
    if r not in (0, 1, 2):
        raise ValueError("r must be 0, 1 or 2")
    if r > 0 and grid.margin < 1:
        raise GridTooCoarseError("derivatives of order %s need a grid margin of at least one node" % r)
    diff = grid.fill(target) - grid.fill(field)
    mask = grid.mask
    return max(interior_sup(fd_derivative(diff, alpha, grid.h), mask) for alpha in multi_indices(grid.n, r))


def _getbins(bins, coords):
    if not np.iterable(bins):
        bins = np.linspace(coords.min(), coords.max(), bins + 1)
    return np.asarray(bins, dtype=float)


def radial_sum(field, coords, bins, weights=1, average=False):
    r"""
    Sum (or average) a field within radial bins.

    Cells are assigned whole to the bin containing their co-ordinate; there is no splitting across bin edges.

    Parameters
    ----------
    field : array
        An array of arbitrary dimension.

    coords : array or list of arrays
        Either the magnitude of the co-ordinates at each point of ``field``, or a list of 1D co-ordinate arrays, one
        per dimension.

    bins : int or array
        Number of bins, or the bin edges.

    weights : array, optional
        Weights, same shape as ``field``.

    average : bool, optional
        Whether to return the weighted average in each bin instead of the weighted sum.

    Returns
    -------
    field_1d : array
        One entry per bin.

    centres : array
        Bin mid-points.
    """
    if isinstance(coords, (list, tuple)) and len(coords) == field.ndim:
        coords = _magnitude_grid(coords)
    bins = _getbins(bins, coords)
    indx = np.digitize(coords.ravel(), bins)
    weights = np.broadcast_to(weights, field.shape).ravel()
    nbins = len(bins) - 1

    sums = np.bincount(indx, weights=(np.real(field).ravel() * weights), minlength=nbins + 2)[1:nbins + 1]
    if np.iscomplexobj(field):
        sums = sums + 1j * np.bincount(indx, weights=np.imag(field).ravel() * weights, minlength=nbins + 2)[1:nbins + 1]

    counts = np.bincount(indx, minlength=nbins + 2)[1:nbins + 1]
    if np.any(counts == 0):
        warnings.warn("One or more radial bins had no cells within it.")

    if average:
        sumweights = np.bincount(indx, weights=weights, minlength=nbins + 2)[1:nbins + 1]
        sums = sums / np.where(sumweights > 0, sumweights, 1)

    return sums, (bins[1:] + bins[:-1]) / 2
