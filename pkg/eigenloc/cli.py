"""
Batch front-end.

Usage::

    eigenloc <subcommand> [--config run.json] [--out DIR] [overrides] [-v]

The subcommands are ``lattice``, ``cover``, ``approximate``, ``synthesize``, ``error-scan``, ``verify`` and ``nodal``.
Every run writes ``manifest.json`` (the configuration, the package version, the exit code and the artifacts written)
into the output directory. A ``ValueError`` ends the run with exit code 2 and an ``ArithmeticError`` with exit code 3;
both leave an ``error.json`` record next to the manifest.
"""
import argparse
import logging
import os
import sys

import numpy as np

from . import __version__, io
from .analysis import EvaluationGrid, cr_error
from .config import MANIFOLDS, RunConfig
from .herglotz import approximate_bessel, build_cap_cover, discretize_density
from .nodal import localized_nodal_check, nodal_extract, reference_components
from .specfun import gegenbauer_norm, gegenbauer_norm_deriv
from .sphere import GeodesicChart, synthesize_sphere
from .torus import EmptyCellError, FlatChart, cap_statistics, enumerate_lattice, synthesize_torus
from .waves import BesselSum, HarmonicExpansion, HerglotzDensity, expansion_to_density

logger = logging.getLogger(__name__)

__all__ = ['main', 'run', 'build_parser', 'Pipeline', 'VerificationError']

# Random points per identity check in ``verify``.
VERIFY_POINTS = 100


class VerificationError(ArithmeticError):
    "At least one identity checked by ``verify`` failed."


class Pipeline(object):
    """
    The chain from a target wave to eigenfunctions, with every intermediate built once.

    Parameters
    ----------
    config : :class:`~eigenloc.config.RunConfig`
        A validated configuration with a target.
    """

    def __init__(self, config):
        self.config = config
        self.wave = config.wave()
        if self.wave.n != config.n:
            raise ValueError("target wave lives in R^%s but n=%s" % (self.wave.n, config.n))
        if self.wave.m != config.m:
            raise ValueError("target wave has %s components but m=%s" % (self.wave.m, config.m))
        self.report = {}
        self._bessel = self._density = self._cover = None

    @property
    def bessel(self):
        "The target as a :class:`~eigenloc.waves.BesselSum` (approximated unless it already is one)."
        if self._bessel is None:
            if isinstance(self.wave, BesselSum):
                self._bessel = self.wave
            else:
                cfg = self.config
                self._bessel, report = approximate_bessel(self.wave, cfg.R, cfg.delta2, n=cfg.n, L=cfg.L,
                                                          choice=cfg.choice, tail_tol=cfg.tail_tol)
                self.report["approximation"] = report
        return self._bessel

    @property
    def density(self):
        "The Herglotz density of the target."
        if self._density is None:
            wave = self.wave
            if isinstance(wave, HerglotzDensity):
                self._density = wave
            elif isinstance(wave, BesselSum):
                self._density = wave.to_herglotz()
            elif isinstance(wave, HarmonicExpansion):
                self._density = expansion_to_density(wave)
            else:
                raise ValueError("a %s has no Herglotz density; give a density, expansion or Bessel sum" % wave.kind)
        return self._density

    @property
    def cover(self):
        if self._cover is None:
            self._cover = build_cap_cover(self.config.n, self.config.eps)
        return self._cover

    def chart(self):
        if self.config.manifold == "sphere":
            return GeodesicChart.at_pole(self.config.n)
        return FlatChart(self.config.n)

    def synthesize(self, N):
        "The degree-``N`` eigenfunction localizing the target, with its chart."
        cfg = self.config
        chart = self.chart()
        if cfg.manifold == "sphere":
            return synthesize_sphere(self.bessel, N, chart), chart
        return synthesize_torus(self.density, self.cover, N, choice=cfg.choice, allow_even=cfg.allow_even), chart


def _grid(cfg):
    return EvaluationGrid(cfg.n, cfg.h, radius=cfg.radius)


def _single_degree(cfg):
    degrees = cfg.degrees
    if len(degrees) != 1:
        raise ValueError("this subcommand needs exactly one degree N, got %s" % (degrees,))
    return degrees[0]


def _path(out, name, artifacts):
    artifacts.append(name)
    return os.path.join(out, name)


def _psi_to_dict(psi, cfg):
    return io.sphere_to_dict(psi) if cfg.manifold == "sphere" else io.torus_to_dict(psi)


def cmd_lattice(cfg, out, artifacts):
    "Enumerate the lattice sphere of radius N and count its directions per cap."
    N = _single_degree(cfg)
    lattice = enumerate_lattice(N, cfg.n)
    io.write_csv(_path(out, "lattice.csv", artifacts), ["k%s" % (i + 1) for i in range(cfg.n)], lattice.points)

    cover = build_cap_cover(cfg.n, cfg.eps)
    counts, expected = cap_statistics(cover, lattice)
    rows = [(i, int(c), float(e), float(a)) for i, (c, e, a) in enumerate(zip(counts, expected, cover.areas))]
    io.write_csv(_path(out, "caps.csv", artifacts), ["cell", "count", "expected", "area"], rows)

    summary = io.lattice_to_dict(lattice)
    summary.update({"symmetric": lattice.symmetric, "eps": cfg.eps, "cells": len(cover),
                    "empty_cells": int(np.sum(counts == 0)), "admissible": bool(np.all(counts > 0))})
    io.write_json(_path(out, "lattice.json", artifacts), summary)


def cmd_cover(cfg, out, artifacts):
    "Build the cap cover of S^{n-1} and export its cells."
    cover = build_cap_cover(cfg.n, cfg.eps)
    io.write_json(_path(out, "cover.json", artifacts), io.cover_to_dict(cover))
    header = ["cell"] + ["xi%s" % (i + 1) for i in range(cfg.n)] + ["area", "diameter"]
    rows = [[i] + list(c) + [a, d] for i, (c, a, d) in enumerate(zip(cover.centers, cover.areas, cover.diameters))]
    io.write_csv(_path(out, "cells.csv", artifacts), header, rows)


def cmd_approximate(cfg, out, artifacts):
    "Discretize the target into a plane-wave sum (cap cover) and a Bessel sum (ball cover)."
    pipe = Pipeline(cfg)
    grid = _grid(cfg)
    density = pipe.density
    planes = discretize_density(density, pipe.cover, cfg.choice)
    if density.real:
        planes = planes.hermitian()
    bessel = pipe.bessel
    io.write_json(_path(out, "plane_wave_sum.json", artifacts), io.wave_to_dict(planes))
    io.write_json(_path(out, "bessel_sum.json", artifacts), io.wave_to_dict(bessel))

    report = dict(pipe.report)
    report.update({"cells": len(pipe.cover), "plane_wave_terms": len(planes), "bessel_terms": len(bessel),
                   "plane_wave_error": cr_error(pipe.wave, planes, grid, cfg.r),
                   "bessel_error": cr_error(pipe.wave, bessel, grid, cfg.r), "r": cfg.r, "h": cfg.h})
    io.write_json(_path(out, "approximate.json", artifacts), report)


def cmd_synthesize(cfg, out, artifacts):
    "Build the eigenfunction of one degree and sample its rescaling on the grid."
    pipe = Pipeline(cfg)
    N = _single_degree(cfg)
    psi, chart = pipe.synthesize(N)
    grid = _grid(cfg)
    field = psi.rescaled(chart)

    io.write_json(_path(out, "%s.json" % cfg.manifold, artifacts), _psi_to_dict(psi, cfg))
    header, rows = io.grid_rows(grid, grid.fill(field))
    io.write_csv(_path(out, "grid.csv", artifacts), header, rows)
    report = dict(pipe.report)
    report.update({"N": N, "terms": len(psi), "eigenvalue": psi.eigenvalue,
                   "error": cr_error(pipe.wave, field, grid, cfg.r), "r": cfg.r, "h": cfg.h})
    io.write_json(_path(out, "synthesize.json", artifacts), report)


def cmd_error_scan(cfg, out, artifacts):
    "The discrete C^r error of the rescaled eigenfunction for every degree of the range."
    pipe = Pipeline(cfg)
    grid = _grid(cfg)
    degrees = cfg.degrees
    if not degrees:
        raise ValueError("error-scan needs N or N_range")

    rows = []
    for N in degrees:
        try:
            psi, chart = pipe.synthesize(N)
        except EmptyCellError as e:
            logger.info("N=%s skipped: %s", N, e)
            rows.append((N, float("nan"), 0, "empty_cells"))
            continue
        error = cr_error(pipe.wave, psi.rescaled(chart), grid, cfg.r)
        logger.info("N=%s: C^%s error %.4e", N, cfg.r, error)
        rows.append((N, error, len(psi), "ok"))
    io.write_csv(_path(out, "scan.csv", artifacts), ["N", "error", "terms", "status"], rows)


def _check(name, value, tol):
    return {"name": name, "value": float(value), "tolerance": tol, "passed": bool(value <= tol)}


def _random_unit(rng, count, dim):
    v = rng.standard_normal((count, dim))
    return v / np.linalg.norm(v, axis=1)[:, None]


def _verify_sphere(psi, rng):
    N, n = psi.N, psi.n
    p = _random_unit(rng, VERIFY_POINTS, n + 1)
    values = psi(p)
    scale = max(1., float(np.abs(values).max()))
    parity = np.abs(psi(-p) - psi.parity * values).max() / scale

    t = rng.uniform(-1, 1, VERIFY_POINTS)
    c0, c1, c2 = (gegenbauer_norm_deriv(N, n, t, k) for k in range(3))
    terms = [(1 - t ** 2) * c2, -n * t * c1, psi.eigenvalue * c0]
    residual = np.abs(sum(terms)) / np.maximum(sum(np.abs(x) for x in terms), 1e-300)
    return [_check("normalization", abs(gegenbauer_norm(N, n, 1.) - 1), 1e-10),
            _check("parity", parity, 1e-10),
            _check("eigen_residual", residual.max(), 1e-8)]


def _verify_torus(psi, rng):
    x = rng.uniform(0, 2 * np.pi, (VERIFY_POINTS, psi.n))
    scale = max(1., float(np.abs(psi.coefficients).sum()))
    values = psi(x)
    residual = np.abs(psi.laplacian(x) + psi.eigenvalue * values).max() / (psi.eigenvalue * scale)

    y = rng.uniform(-1, 1, (VERIFY_POINTS, psi.n))
    rescaling = np.abs(psi.rescaled()(y) - psi.plane_wave_sum()(y)).max() / scale
    checks = [_check("eigen_residual", residual, 1e-12), _check("rescaling", rescaling, 1e-12)]
    if psi.real:
        checks.append(_check("realness", np.abs(values.imag).max() / scale, 1e-12))
    return checks


def cmd_verify(cfg, out, artifacts):
    "Check the exact identities of the eigenfunction of one degree."
    pipe = Pipeline(cfg)
    N = _single_degree(cfg)
    psi, _ = pipe.synthesize(N)
    rng = np.random.RandomState(cfg.seed)
    checks = _verify_sphere(psi, rng) if cfg.manifold == "sphere" else _verify_torus(psi, rng)

    passed = all(c["passed"] for c in checks)
    rows = [(c["name"], c["value"], c["tolerance"], c["passed"]) for c in checks]
    io.write_csv(_path(out, "verify.csv", artifacts), ["check", "value", "tolerance", "passed"], rows)
    io.write_json(_path(out, "verify.json", artifacts), {"N": N, "manifold": cfg.manifold, "checks": checks,
                                                          "passed": passed})
    if not passed:
        failed = [c["name"] for c in checks if not c["passed"]]
        raise VerificationError("identity check(s) failed: %s" % ", ".join(failed))


def cmd_nodal(cfg, out, artifacts):
    "Extract the nodal components of target and eigenfunction and match them."
    pipe = Pipeline(cfg)
    N = _single_degree(cfg)
    grid = _grid(cfg)
    references = reference_components(pipe.wave, grid)
    psi, chart = pipe.synthesize(N)
    extracted = nodal_extract(grid, psi.rescaled(chart))
    report = localized_nodal_check(psi, chart, references, grid, extracted=extracted)
    report["references"] = [c.summary() for c in references]
    io.write_json(_path(out, "nodal.json", artifacts), report)

    for prefix, comps in (("reference", references), ("component", extracted)):
        for i, comp in enumerate(comps):
            if comp.kind != "points" and comp.vertices.shape[1] == 3:
                io.write_obj(_path(out, "%s_%s.obj" % (prefix, i), artifacts), comp)
            io.write_csv(_path(out, "%s_%s.csv" % (prefix, i), artifacts),
                         ["x%s" % (k + 1) for k in range(grid.n)], comp.vertices)


COMMANDS = {"lattice": cmd_lattice, "cover": cmd_cover, "approximate": cmd_approximate,
            "synthesize": cmd_synthesize, "error-scan": cmd_error_scan, "verify": cmd_verify, "nodal": cmd_nodal}


def _finish(config, subcommand, artifacts, code, error=None):
    out = config.out
    try:
        if not os.path.isdir(out):
            os.makedirs(out)
        if error is not None:
            record = {"error": type(error).__name__, "message": str(error), "exit_code": code}
            io.write_json(os.path.join(out, "error.json"), record)
            artifacts.append("error.json")
        io.write_json(os.path.join(out, "manifest.json"),
                      {"subcommand": subcommand, "version": __version__, "config": config.to_dict(),
                       "exit_code": code, "artifacts": artifacts})
    except (OSError, TypeError) as e:
        logger.error("could not write the run record to %s: %s", out, e)
    return code


def run(subcommand, config):
    """
    Run one subcommand.

    Parameters
    ----------
    subcommand : str
        One of ``COMMANDS``.

    config : :class:`~eigenloc.config.RunConfig`
        The run configuration; ``config.out`` is the output directory.

    Returns
    -------
    int
        0 on success, 2 for invalid input, 3 for a numerical failure.
    """
    artifacts = []
    try:
        if subcommand not in COMMANDS:
            raise ValueError("unknown subcommand %r" % subcommand)
        config.validate()
        if not os.path.isdir(config.out):
            os.makedirs(config.out)
        COMMANDS[subcommand](config, config.out, artifacts)
    except ValueError as e:
        sys.stderr.write("eigenloc %s: %s\n" % (subcommand, e))
        return _finish(config, subcommand, artifacts, 2, e)
    except ArithmeticError as e:
        sys.stderr.write("eigenloc %s: %s\n" % (subcommand, e))
        return _finish(config, subcommand, artifacts, 3, e)
    logger.info("%s finished; %s artifact(s) in %s", subcommand, len(artifacts), config.out)
    return _finish(config, subcommand, artifacts, 0)


def _add_common(p):
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="output directory")
    p.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debugging output")
    p.add_argument("--manifold", choices=MANIFOLDS)
    p.add_argument("--n", type=int, help="dimension")
    p.add_argument("--m", type=int, help="number of components")
    p.add_argument("--N", type=int, help="degree")
    p.add_argument("--N-range", dest="N_range", type=int, nargs="+", metavar="N", help="list of degrees")
    p.add_argument("--target", help="wave document: a path or inline JSON")
    p.add_argument("--eps", type=float, help="cap diameter")
    p.add_argument("--delta2", type=float, help="ball cell diameter")
    p.add_argument("--R", type=float, help="Fourier truncation radius")
    p.add_argument("--h", type=float, help="grid step")
    p.add_argument("--r", type=int, choices=(0, 1, 2), help="derivative order of the error")
    p.add_argument("--radius", type=float, help="radius of the evaluation ball")
    p.add_argument("--L", type=int, help="harmonic truncation degree")
    p.add_argument("--choice", choices=("center", "corner"), help="representative point of each cell")
    p.add_argument("--tail-tol", dest="tail_tol", type=float, help="bound on the Fourier tail mass")
    p.add_argument("--allow-even", dest="allow_even", action="store_const", const=True,
                   help="accept even N on T^3")
    p.add_argument("--seed", type=int, help="seed of the random verification points")


def build_parser():
    parser = argparse.ArgumentParser(prog="eigenloc", description="Inverse localization of Laplace eigenfunctions "
                                                                  "on spheres and flat tori.")
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = parser.add_subparsers(dest="subcommand")
    for name in sorted(COMMANDS):
        _add_common(sub.add_parser(name, help=COMMANDS[name].__doc__))
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return 2

    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    overrides = {key: getattr(args, key, None) for key in RunConfig.FIELDS}
    config = RunConfig()
    try:
        if args.config:
            config = RunConfig.from_file(args.config)
        config.update(overrides)
    except (ValueError, OSError) as e:
        sys.stderr.write("eigenloc: bad configuration: %s\n" % e)
        config.update({"out": args.out})
        return _finish(config, args.subcommand, [], 2, e)
    return run(args.subcommand, config)


if __name__ == "__main__":
    sys.exit(main())
