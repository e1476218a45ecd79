"""
Reading and writing the artifacts of :mod:`eigenloc`.

Waves, covers, lattices and eigenfunctions are written as JSON documents with sorted keys, so identical objects give
byte-identical files. Complex arrays are stored as ``{"real": [...], "imag": [...]}`` and real arrays as nested lists.
Tabular output (grid samples, scans, lattice points, cap counts) is CSV and nodal surfaces are Wavefront OBJ. The
field names of every document are listed in ``docs/schema.rst``.
"""
import csv
import json
import os

import numpy as np

from .sphere import SphereEigenfunction
from .torus import LatticeSphere, TorusEigenfunction
from .waves import BesselSum, HarmonicExpansion, HerglotzDensity, PlaneWaveSum

__all__ = ['wave_to_dict', 'wave_from_dict', 'load_wave', 'cover_to_dict', 'lattice_to_dict', 'lattice_from_dict',
           'sphere_to_dict', 'sphere_from_dict', 'torus_to_dict', 'torus_from_dict', 'write_json', 'read_json',
           'write_csv', 'grid_rows', 'write_obj']

WAVE_KINDS = ("bessel_sum", "plane_wave_sum", "herglotz_grid", "harmonic_expansion")


def _encode(a):
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return {"real": a.real.tolist(), "imag": a.imag.tolist()}
    return a.tolist()


def _decode(obj, dtype=float):
    if isinstance(obj, dict):
        return np.asarray(obj["real"], dtype=float) + 1j * np.asarray(obj["imag"], dtype=float)
    return np.asarray(obj, dtype=dtype)


def _require(d, *keys):
    missing = [k for k in keys if k not in d]
    if missing:
        raise ValueError("%s document is missing field(s) %s" % (d.get("kind", "wave"), ", ".join(missing)))


def wave_to_dict(wave):
    """
    JSON-ready description of a wave.

    A :class:`~eigenloc.waves.HerglotzDensity` is stored through its samples at the quadrature nodes of degree
    ``bandwidth``; reading it back gives the band-limited projection of the density.
    """
    kind = getattr(wave, "kind", None)
    if kind == "bessel_sum":
        return {"kind": kind, "n": wave.n, "m": wave.m, "radius": wave.radius,
                "centers": _encode(wave.centers), "coefficients": _encode(wave.coefficients)}
    if kind == "plane_wave_sum":
        return {"kind": kind, "n": wave.n, "m": wave.m,
                "directions": _encode(wave.directions), "coefficients": _encode(wave.coefficients)}
    if kind == "herglotz_grid":
        nodes, values = wave.samples()
        return {"kind": kind, "n": wave.n, "m": wave.m, "degree": wave.bandwidth, "real": bool(wave.real),
                "nodes": _encode(nodes), "values": _encode(values)}
    if kind == "harmonic_expansion":
        return {"kind": kind, "n": wave.n, "m": wave.m, "L": wave.L, "index": [list(i) for i in wave.index],
                "coefficients": _encode(wave.coefficients), "truncation_error": wave.truncation_error}
    raise ValueError("cannot serialize an object of kind %r" % (kind,))


def wave_from_dict(d):
    "Inverse of :func:`wave_to_dict`."
    kind = d.get("kind")
    if kind not in WAVE_KINDS:
        raise ValueError("unknown wave kind %r; expected one of %s" % (kind, WAVE_KINDS))

    if kind == "bessel_sum":
        _require(d, "centers", "coefficients")
        return BesselSum(_decode(d["coefficients"]), _decode(d["centers"]), radius=d.get("radius"), n=d.get("n"))
    if kind == "plane_wave_sum":
        _require(d, "directions", "coefficients")
        return PlaneWaveSum(_decode(d["coefficients"]), _decode(d["directions"]), n=d.get("n"))
    if kind == "herglotz_grid":
        _require(d, "n", "degree", "values")
        return HerglotzDensity.from_samples(d["n"], d["degree"], _decode(d["values"]), real=d.get("real", False))

    _require(d, "n", "L", "coefficients")
    expansion = HarmonicExpansion(d["n"], d["L"], _decode(d["coefficients"]))
    expansion.truncation_error = d.get("truncation_error")
    return expansion


def load_wave(ref):
    """
    Resolve a wave reference: an inline document (dict or JSON string) or the path of a JSON file.
    """
    if isinstance(ref, dict):
        return wave_from_dict(ref)
    if not isinstance(ref, str):
        raise ValueError("a wave reference must be a dict, a JSON string or a path")
    if ref.lstrip().startswith("{"):
        return wave_from_dict(json.loads(ref))
    if not os.path.exists(ref):
        raise ValueError("wave file %s does not exist" % ref)
    return wave_from_dict(read_json(ref))


def cover_to_dict(cover):
    "A :class:`~eigenloc.herglotz.SphericalCapCover` as cells with bounds, centres, areas and diameters."
    return {"n": cover.n, "eps": cover.eps, "cells": len(cover), "total_area": cover.total_area,
            "antipodal_symmetric": cover.antipodal_symmetric,
            "lo": _encode(cover.lo), "hi": _encode(cover.hi), "centers": _encode(cover.centers),
            "areas": _encode(cover.areas), "diameters": _encode(cover.diameters)}


def lattice_to_dict(lattice):
    return {"N": lattice.N, "n": lattice.n, "count": len(lattice), "points": lattice.points.tolist()}


def lattice_from_dict(d):
    return LatticeSphere(d["N"], d["n"], np.asarray(d["points"], dtype=np.int64).reshape(-1, d["n"]))


def sphere_to_dict(psi):
    "A :class:`~eigenloc.sphere.SphereEigenfunction` as its degree, dimension and kernel terms."
    return {"N": psi.N, "n": psi.n, "m": psi.m, "eigenvalue": psi.eigenvalue, "parity": psi.parity,
            "points": _encode(psi.points), "coefficients": _encode(psi.coefficients)}


def sphere_from_dict(d):
    return SphereEigenfunction(d["N"], d["n"], _decode(d["coefficients"]), _decode(d["points"]), m=d.get("m"))


def torus_to_dict(psi):
    "A :class:`~eigenloc.torus.TorusEigenfunction` as its modes."
    return {"N": psi.N, "n": psi.n, "m": psi.m, "eigenvalue": psi.eigenvalue, "real": bool(psi.real),
            "vectors": psi.vectors.tolist(), "coefficients": _encode(psi.coefficients.astype(complex))}


def torus_from_dict(d):
    return TorusEigenfunction(d["N"], d["n"], np.asarray(d["vectors"], dtype=np.int64),
                              _decode(d["coefficients"]), real=d.get("real", False), m=d.get("m"))


def _plain(obj):
    "Numpy scalars and arrays to plain Python, recursively."
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if np.isfinite(value) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return {"real": obj.real, "imag": obj.imag}
    return obj


def write_json(path, obj):
    "Write ``obj`` with sorted keys; non-finite floats become ``null``."
    with open(path, "w") as fp:
        json.dump(_plain(obj), fp, sort_keys=True, indent=2)
        fp.write("\n")
    return path


def read_json(path):
    with open(path) as fp:
        return json.load(fp)


def write_csv(path, header, rows):
    "Write a header line and rows; floats are written with ``repr`` precision."
    with open(path, "w", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def grid_rows(grid, values, masked=True):
    """
    Header and rows ``x1..xn, psi1..psim`` (real parts) for the nodes of a grid.

    Parameters
    ----------
    grid : :class:`~eigenloc.analysis.EvaluationGrid`
        The grid.

    values : array
        Shape ``(N,)*n + (m,)``, as from :meth:`~eigenloc.analysis.EvaluationGrid.fill`.

    masked : bool, optional
        Only write nodes inside the ball.
    """
    values = np.real(np.asarray(values)).reshape(-1, values.shape[-1])
    points = grid.points
    if masked:
        keep = grid.mask.ravel()
        points, values = points[keep], values[keep]
    header = ["x%s" % (i + 1) for i in range(grid.n)] + ["psi%s" % (j + 1) for j in range(values.shape[1])]
    return header, np.column_stack([points, values])


def write_obj(path, component):
    """
    Write a nodal component as Wavefront OBJ: ``v`` lines, then ``f`` lines for a surface or ``l`` lines for a
    curve (1-based indices).
    """
    if component.vertices.shape[1] != 3:
        raise ValueError("OBJ export needs vertices in R^3")
    with open(path, "w") as fp:
        fp.write("# %s component: euler=%s genus=%s\n" % (component.kind, component.euler, component.genus))
        for v in component.vertices:
            fp.write("v %r %r %r\n" % tuple(float(c) for c in v))
        if component.kind == "surface":
            for f in component.faces:
                fp.write("f %d %d %d\n" % tuple(f + 1))
        elif component.kind == "curve":
            for e in component.edges:
                fp.write("l %d %d\n" % tuple(e + 1))
    return path

