__version__ = "0.1.0"

from .specfun import bessel_kernel, gegenbauer_norm, mehler_heine_pair, multiplicity
from .waves import BesselSum, PlaneWaveSum, HerglotzDensity, HarmonicExpansion, eval_wave, helmholtz_residual, \
    expand_wave, expansion_to_density
from .herglotz import SphericalCapCover, BallCellCover, build_cap_cover, discretize_density, extend_and_transform, \
    discretize_fourier, approximate_bessel
from .sphere import GeodesicChart, SphereEigenfunction, PlaneWaveHarmonic, chart_map, synthesize_sphere, \
    synthesize_plane_waves, eval_sphere, multi_synthesize, decay_profile
from .torus import LatticeSphere, TorusEigenfunction, enumerate_lattice, assign_caps, synthesize_torus, eval_torus, \
    search_torus2
from .analysis import EvaluationGrid, cr_error
from .nodal import NodalComponent, nodal_extract, stability_margin, localized_nodal_check
from .targets import NodalTarget, TARGETS
from .config import RunConfig
