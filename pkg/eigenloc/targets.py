"""
Example target waves whose stable nodal components are known in closed form.

Every :class:`NodalTarget` pairs a wave with the topology of one nodal component it is built around, a ball
containing that component and the closed form of the wave. The targets are

* :func:`kernel_sphere` -- the Bessel kernel in :math:`\\mathbb{R}^3`, whose first nodal component is the round sphere
  :math:`|x|=\\pi`;
* :func:`kernel_circle` -- the Bessel kernel in :math:`\\mathbb{R}^2`, with the circle :math:`|x|=j_{0,1}`;
* :func:`equatorial_circle` -- a pair of Bessel sums whose joint zero set in :math:`B_4` is the circle
  :math:`\\{|x|=\\pi,\\ x_3=0\\}`;
* :func:`nodal_torus` -- an axisymmetric plane-wave sum with a nodal surface of genus one.

:func:`reference_components` of :mod:`eigenloc.nodal` extracts every component of the target on a grid;
:meth:`NodalTarget.references` keeps those of the advertised topology.
"""
import logging

import numpy as np
from scipy import special

from . import specfun
from .analysis import EvaluationGrid
from .nodal import reference_components
from .waves import BesselSum, PlaneWaveSum

logger = logging.getLogger(__name__)

__all__ = ['NodalTarget', 'kernel_sphere', 'kernel_circle', 'equatorial_circle', 'nodal_torus', 'TARGETS']


class NodalTarget(object):
    """
    A target wave with a stable nodal component of known topology.

    Parameters
    ----------
    name : str
        Registry name.

    wave : :class:`~eigenloc.waves.Wave`
        The target.

    exact : callable
        Closed form of the wave, points ``(P, n)`` to values ``(P, m)``.

    kind : {"surface", "curve"}
        Kind of the component.

    euler : int
        Its Euler characteristic.

    genus : int or None
        Its genus (surfaces only).

    radius : float
        Radius of a ball that contains the component with room to spare.

    h : float
        Grid step that resolves the component.
    """

    def __init__(self, name, wave, exact, kind, euler, genus, radius, h):
        self.name = name
        self.wave = wave
        self.exact = exact
        self.kind = kind
        self.euler = euler
        self.genus = genus
        self.radius = radius
        self.h = h

    @property
    def n(self):
        return self.wave.n

    @property
    def m(self):
        return self.wave.m

    def grid(self, h=None):
        "The evaluation grid on the target's ball."
        return EvaluationGrid(self.n, self.h if h is None else h, radius=self.radius)

    def matches(self, comp):
        "Whether a component has the advertised topology."
        return comp.kind == self.kind and bool(comp.closed) and comp.euler == self.euler and comp.genus == self.genus

    def references(self, grid=None, step=1e-4):
        """
        The closed components of the advertised topology, with their stability margins.

        Parameters
        ----------
        grid : :class:`~eigenloc.analysis.EvaluationGrid`, optional
            Defaults to :meth:`grid`.

        step : float, optional
            Difference step of the stability margins.

        Returns
        -------
        list of :class:`~eigenloc.nodal.NodalComponent`
        """
        grid = self.grid() if grid is None else grid
        comps = reference_components(self.wave, grid, step)
        kept = [c for c in comps if self.matches(c)]
        logger.info("%s: %s of %s components have the expected topology", self.name, len(kept), len(comps))
        return kept


def kernel_sphere():
    "The kernel :math:`\\sqrt{2/\\pi}\\sin|x|/|x|` in :math:`\\mathbb{R}^3`; its nodal sphere has radius :math:`\\pi`."
    def exact(x):
        return specfun.bessel_kernel(3, np.linalg.norm(x, axis=1))[:, None]

    return NodalTarget("kernel_sphere", BesselSum([1.], np.zeros((1, 3))), exact, "surface", 2, 0, 4., 0.1)


def kernel_circle():
    "The kernel :math:`J_0(|x|)` in :math:`\\mathbb{R}^2`; its first nodal circle has radius :math:`j_{0,1}`."
    def exact(x):
        return special.j0(np.linalg.norm(x, axis=1))[:, None]

    return NodalTarget("kernel_circle", BesselSum([1.], np.zeros((1, 2))), exact, "curve", 0, None, 3., 0.05)


def equatorial_circle(shift=1.):
    r"""
    Two fields in :math:`\mathbb{R}^3` meeting transversally along the circle :math:`|x|=\pi,\ x_3=0`.

    The first field is the kernel :math:`K(|x|)`, the second :math:`K(|x-se_3|)-K(|x+se_3|)`, odd in :math:`x_3`. On
    the sphere :math:`|x|=\pi` both shifted distances stay below the first critical point of :math:`K`, so the second
    field vanishes there only on the equator.

    Parameters
    ----------
    shift : float, optional
        The shift :math:`s`, in :math:`(0, 1.3]`.
    """
    if not 0 < shift <= 1.3:
        raise ValueError("shift must lie in (0, 1.3]")
    e3 = np.array([0., 0., shift])
    wave = BesselSum([[1., 0.], [0., 1.], [0., -1.]], [np.zeros(3), e3, -e3])

    def exact(x):
        k = [specfun.bessel_kernel(3, np.linalg.norm(x - c, axis=1)) for c in (0., e3, -e3)]
        return np.column_stack([k[0], k[1] - k[2]])

    return NodalTarget("equatorial_circle", wave, exact, "curve", 0, None, 4., 0.1)


def nodal_torus(alpha=0.92, delta=0.1, ring=32):
    r"""
    The wave :math:`J_0(\alpha\rho)\cos(\beta z)-\delta\cos z` with :math:`\alpha^2+\beta^2=1`, as a plane-wave sum.

    :math:`J_0(\alpha\rho)\cos(\beta z)` is negative on the solid torus
    :math:`j_{0,1}<\alpha\rho<j_{0,2},\ |z|<\pi/(2\beta)`, whose boundary lies in its nodal set. The term
    :math:`-\delta\cos z` is positive at the corner circles of that box when :math:`\cos(\pi/(2\beta))<0`, which cuts
    the boundary free of the neighbouring nodal surfaces and leaves a smooth nodal torus. The Bessel factor is the
    ``ring``-point trapezoid rule of its Herglotz integral over the circles of height :math:`\pm\beta`, exact to
    rounding on the target's ball.

    Parameters
    ----------
    alpha : float, optional
        Horizontal frequency; :math:`\beta=\sqrt{1-\alpha^2}` must lie in :math:`(1/3, 1)`.

    delta : float, optional
        Weight of the separating term, small and positive.

    ring : int, optional
        Even number of directions on each circle.
    """
    beta = np.sqrt(1 - alpha ** 2) if 0 < alpha < 1 else 0.
    if not 1 / 3. < beta < 1:
        raise ValueError("alpha=%s gives beta=%.3f outside (1/3, 1)" % (alpha, beta))
    if not 0 < delta < 0.3:
        raise ValueError("delta must lie in (0, 0.3)")
    if ring % 2 or ring < 16:
        raise ValueError("ring must be an even number of at least 16 directions")

    theta = 2 * np.pi * np.arange(ring) / ring
    circle = np.column_stack([alpha * np.cos(theta), alpha * np.sin(theta)])
    directions = np.vstack([np.column_stack([circle, np.full(ring, beta)]),
                            np.column_stack([circle, np.full(ring, -beta)]),
                            [[0., 0., 1.], [0., 0., -1.]]])
    coefficients = np.concatenate([np.full(2 * ring, 1. / (2 * ring)), [-delta / 2., -delta / 2.]])
    wave = PlaneWaveSum(coefficients, directions)

    def exact(x):
        rho = np.hypot(x[:, 0], x[:, 1])
        return (special.j0(alpha * rho) * np.cos(beta * x[:, 2]) - delta * np.cos(x[:, 2]))[:, None]

    corner = np.hypot(special.jn_zeros(0, 2)[1] / alpha, np.pi / (2 * beta))
    return NodalTarget("nodal_torus", wave, exact, "surface", 0, 1, float(corner) + 0.4, 0.2)


#: The registry of examples by name.
TARGETS = {"kernel_sphere": kernel_sphere, "kernel_circle": kernel_circle, "equatorial_circle": equatorial_circle,
           "nodal_torus": nodal_torus}
