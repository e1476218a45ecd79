"""
Nodal sets of fields sampled on an :class:`~eigenloc.analysis.EvaluationGrid`, their topology and their stability.

Zero sets are extracted with marching simplices, which give watertight, manifold output without the ambiguous cases of
marching cubes: in 3D every cube is cut into the six tetrahedra around its main diagonal, in 2D every square into two
triangles. Only cells whose corners all lie inside the grid's ball mask are used. Vertices are placed by linear
interpolation on grid edges and shared between neighbouring cells, so the Euler characteristic of each component is
exact on the emitted triangulation.

Common zeros of two fields in 3D are traced as the zero curves of the second field on the triangulated zero surface of
the first. Other combinations of dimension and number of fields only produce a point cloud (the centres of cells where
every field changes sign) without topology.

Exact zeros at grid nodes are avoided by shifting the level by ``1e-12`` times the field's scale.
"""
import itertools
import logging

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

logger = logging.getLogger(__name__)

__all__ = ['NodalComponent', 'nodal_extract', 'stability_margin', 'reference_components', 'localized_nodal_check',
           'hausdorff']

#: Relative shift of the zero level.
TIE_BREAK = 1e-12

_OTHERS3 = np.array([[1, 2], [0, 2], [0, 1]])
_OTHERS4 = np.array([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])


class NodalComponent(object):
    """
    A connected piece of a zero set.

    Parameters
    ----------
    vertices : array
        Shape ``(V, n)``.

    cells : array of int
        Triangles ``(F, 3)`` for a surface, segments ``(E, 2)`` for a curve, or empty for a point cloud.

    kind : {"surface", "curve", "points"}
        What the component is.

    Attributes
    ----------
    euler : int or None
        :math:`V-E+F` for surfaces, :math:`V-E` for curves.

    closed : bool or None
        Whether every edge borders two triangles (surfaces) or every vertex has two segments (curves).

    genus : int or None
        :math:`(2-\\chi)/2` for closed surfaces.

    margin : float or None
        Stability margin, once computed by :func:`stability_margin`.
    """

    def __init__(self, vertices, cells, kind):
        self.vertices = np.asarray(vertices, dtype=float)
        self.kind = kind
        self.margin = None
        self.euler = self.closed = self.genus = None

        if kind == "surface":
            self.faces = np.asarray(cells, dtype=int).reshape(-1, 3)
            edges, counts = _face_edges(self.faces)
            self.edges = edges
            self.euler = len(self.vertices) - len(edges) + len(self.faces)
            self.closed = bool(np.all(counts == 2))
            if self.closed:
                self.genus = (2 - self.euler) // 2
        elif kind == "curve":
            self.edges = np.asarray(cells, dtype=int).reshape(-1, 2)
            self.faces = np.zeros((0, 3), dtype=int)
            self.euler = len(self.vertices) - len(self.edges)
            degree = np.bincount(self.edges.ravel(), minlength=len(self.vertices))
            self.closed = bool(np.all(degree == 2))
        elif kind == "points":
            self.edges = np.zeros((0, 2), dtype=int)
            self.faces = np.zeros((0, 3), dtype=int)
        else:
            raise ValueError("unknown component kind %r" % kind)

    def __len__(self):
        return len(self.vertices)

    def summary(self):
        "JSON-ready description without the geometry."
        return {"kind": self.kind, "vertices": len(self.vertices), "edges": len(self.edges),
                "faces": len(self.faces), "euler": self.euler, "closed": self.closed, "genus": self.genus,
                "margin": self.margin}


def _face_edges(faces):
    e = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    e.sort(axis=1)
    return np.unique(e, axis=0, return_counts=True)


def _level(values, tie_break):
    scale = np.max(np.abs(values)) if values.size else 0.
    return values - tie_break * (scale if scale > 0 else 1.)


def _active_cells(positive, inside):
    "Base indices of grid cells that have a sign change and lie entirely inside the mask."
    n = positive.ndim
    cut = tuple(slice(0, -1) for _ in range(n))
    any_pos = np.zeros(positive[cut].shape, dtype=bool)
    any_neg = np.zeros_like(any_pos)
    all_in = np.ones_like(any_pos)
    for offset in itertools.product((0, 1), repeat=n):
        sl = tuple(slice(o, o + s) for o, s in zip(offset, any_pos.shape))
        any_pos |= positive[sl]
        any_neg |= ~positive[sl]
        all_in &= inside[sl]
    return np.argwhere(any_pos & any_neg & all_in)


def _weld(pairs, node_values, node_positions):
    """
    Turn crossing edges ``(..., 2)`` of node ids into shared interpolated vertices.

    Returns the vertex positions, the vertex id of each pair, and the unique node pairs.
    """
    a = np.minimum(pairs[..., 0], pairs[..., 1])
    b = np.maximum(pairs[..., 0], pairs[..., 1])
    total = len(node_values)
    keys, inverse = np.unique(a.astype(np.int64) * total + b, return_inverse=True)
    ua, ub = keys // total, keys % total
    va, vb = node_values[ua], node_values[ub]
    t = va / (va - vb)
    positions = node_positions[ua] + t[:, None] * (node_positions[ub] - node_positions[ua])
    return positions, inverse.reshape(a.shape), np.column_stack([ua, ub]), t


def _edge(u, v):
    return np.stack([u, v], axis=-1)


def _march_tetrahedra(tets, node_values, node_positions):
    "Triangles of the zero set of a piecewise linear field on tetrahedra ``(M, 4)`` of node ids."
    vals = node_values[tets]
    pos = vals > 0
    count = pos.sum(axis=1)
    rows = np.arange(len(tets))

    odd = (count == 1) | (count == 3)
    r = rows[odd]
    single = np.where(count[odd] == 1, np.argmax(pos[odd], axis=1), np.argmax(~pos[odd], axis=1))
    others = _OTHERS4[single]
    tri_a = np.stack([np.stack([tets[r, single], tets[r, others[:, k]]], axis=-1) for k in range(3)], axis=1)

    even = count == 2
    r2 = rows[even]
    order = np.argsort(~pos[even], axis=1, kind='stable')
    p1, p2, q1, q2 = (tets[r2, order[:, k]] for k in range(4))
    tri_b = np.stack([_edge(p1, q1), _edge(p1, q2), _edge(p2, q2)], axis=1)
    tri_c = np.stack([_edge(p1, q1), _edge(p2, q2), _edge(p2, q1)], axis=1)

    pairs = np.concatenate([tri_a, tri_b, tri_c])
    source = np.concatenate([r, r2, r2])

    # direction from the negative to the positive side, for orientation
    pts = node_positions[tets[source]]
    w = pos[source][..., None]
    up = (pts * w).sum(1) / w.sum(1) - (pts * ~w).sum(1) / (~w).sum(1)
    return pairs, up


def _orient(faces, positions, up):
    v0, v1, v2 = (positions[faces[:, k]] for k in range(3))
    normal = np.cross(v1 - v0, v2 - v0)
    flip = np.sum(normal * up, axis=1) < 0
    faces = faces.copy()
    faces[flip, 1], faces[flip, 2] = faces[flip, 2].copy(), faces[flip, 1].copy()
    return faces


def _march_triangles(tris, node_values):
    "Segments (as pairs of crossing edges) of the zero set on triangles ``(T, 3)`` of node ids."
    pos = node_values[tris] > 0
    count = pos.sum(axis=1)
    r = np.flatnonzero((count == 1) | (count == 2))
    single = np.where(count[r] == 1, np.argmax(pos[r], axis=1), np.argmax(~pos[r], axis=1))
    others = _OTHERS3[single]
    s = tris[r, single]
    return np.stack([np.stack([s, tris[r, others[:, 0]]], axis=-1), np.stack([s, tris[r, others[:, 1]]], axis=-1)],
                    axis=1)


def _components(positions, cells, kind):
    if len(cells) == 0:
        return []
    k = cells.shape[1]
    links = np.concatenate([cells[:, [i, (i + 1) % k]] for i in range(k if k > 2 else 1)])
    V = len(positions)
    graph = coo_matrix((np.ones(len(links)), (links[:, 0], links[:, 1])), shape=(V, V))
    ncomp, labels = connected_components(graph, directed=False)
    cell_label = labels[cells[:, 0]]

    out = []
    for c in range(ncomp):
        vid = np.flatnonzero(labels == c)
        remap = np.full(V, -1, dtype=int)
        remap[vid] = np.arange(len(vid))
        out.append(NodalComponent(positions[vid], remap[cells[cell_label == c]], kind))
    out.sort(key=lambda comp: (-len(comp), tuple(np.round(comp.vertices.min(axis=0), 9))))
    return out


def _node_positions(grid, shape):
    return np.stack(np.meshgrid(*([grid.x] * len(shape)), indexing='ij'), axis=-1).reshape(-1, len(shape))


def _simplices(bases, shape):
    "Node ids of the simplices of the cells with the given base indices (6 tetrahedra or 2 triangles per cell)."
    n = len(shape)
    strides = np.array([int(np.prod(shape[i + 1:])) for i in range(n)])
    base = bases @ strides
    eye = np.eye(n, dtype=int)
    out = []
    for perm in itertools.permutations(range(n)):
        path = np.cumsum(np.vstack([np.zeros(n, dtype=int), eye[list(perm)]]), axis=0)
        out.append(base[:, None] + (path @ strides)[None, :])
    return np.concatenate(out)


def nodal_extract(grid, values, tie_break=TIE_BREAK):
    """
    Connected components of the zero set of grid values.

    Parameters
    ----------
    grid : :class:`~eigenloc.analysis.EvaluationGrid`
        The grid the values live on; its mask restricts the extraction.

    values : array or callable
        Values of shape ``(N,)*n + (m,)`` (or ``(N,)*n``), or a field evaluator, which is sampled on the grid. Only
        the real part is used.

    tie_break : float, optional
        Relative shift of the zero level.

    Returns
    -------
    list of :class:`NodalComponent`
        Largest first.
    """
    if callable(values):
        values = grid.fill(values)
    values = np.real(np.asarray(values))
    shape = grid.shape
    values = values.reshape(shape + (-1,))
    n, m = grid.n, values.shape[-1]
    inside = grid.mask
    positions = _node_positions(grid, shape)
    level = [_level(values[..., j], tie_break) for j in range(m)]

    if m == 1 and n in (2, 3):
        v = level[0]
        bases = _active_cells(v > 0, inside)
        simplices = _simplices(bases, shape)
        flat = v.ravel()
        if n == 3:
            pairs, up = _march_tetrahedra(simplices, flat, positions)
            verts, faces, _, _ = _weld(pairs, flat, positions)
            comps = _components(verts, _orient(faces, verts, up), "surface")
        else:
            pairs = _march_triangles(simplices, flat)
            verts, segs, _, _ = _weld(pairs, flat, positions)
            comps = _components(verts, segs, "curve")
    elif m == 2 and n == 3:
        comps = _joint_curves(level, inside, shape, positions)
    else:
        comps = _point_cloud(level, inside, grid)

    logger.info("extracted %s nodal components on a %s grid (h=%s)", len(comps), "x".join(map(str, shape)), grid.h)
    return comps


def _joint_curves(level, inside, shape, positions):
    first, second = level[0].ravel(), level[1].ravel()
    bases = _active_cells(level[0] > 0, inside)
    pairs, _ = _march_tetrahedra(_simplices(bases, shape), first, positions)
    verts, faces, nodes, t = _weld(pairs, first, positions)
    # the second field, linearly interpolated to the surface vertices
    on_surface = second[nodes[:, 0]] + t * (second[nodes[:, 1]] - second[nodes[:, 0]])
    on_surface = np.where(on_surface == 0, -np.abs(first).max() * TIE_BREAK, on_surface)
    segment_pairs = _march_triangles(faces, on_surface)
    curve_verts, segs, _, _ = _weld(segment_pairs, on_surface, verts)
    return _components(curve_verts, segs, "curve")


def _point_cloud(level, inside, grid):
    mixed = None
    for v in level:
        bases = _active_cells(v > 0, inside)
        hit = set(map(tuple, bases.tolist()))
        mixed = hit if mixed is None else mixed & hit
    if not mixed:
        return []
    bases = np.array(sorted(mixed))
    centres = grid.x[bases] + grid.h / 2
    logger.info("no topology for %s fields in %s dimensions; returning %s cell centres", len(level), grid.n,
                len(centres))
    return [NodalComponent(centres, [], "points")]


def stability_margin(field, component, step=1e-4):
    """
    Smallest singular value of the field's Jacobian over the component's vertices.

    The Jacobian (``m x n``) is taken by centred differences of width ``step``. A positive margin certifies that the
    gradients of the ``m`` fields are independent along the component, so the component persists under perturbations
    small in :math:`C^1`. The result is also stored in ``component.margin``.

    Parameters
    ----------
    field : callable
        Maps points ``(P, n)`` to values ``(P,)`` or ``(P, m)``; the real part is used.

    component : :class:`NodalComponent`
        A component extracted from the same field.

    step : float, optional
        Difference step.

    Returns
    -------
    float
    """
    x = component.vertices
    V, n = x.shape
    if V == 0:
        component.margin = 0.
        return 0.
    shifts = step * np.eye(n)
    stencil = np.concatenate([x[:, None, :] + shifts[None], x[:, None, :] - shifts[None]], axis=1).reshape(-1, n)
    f = np.real(np.asarray(field(stencil))).reshape(V, 2 * n, -1)
    jac = (f[:, :n, :] - f[:, n:, :]).transpose(0, 2, 1) / (2 * step)
    sigma = np.linalg.svd(jac, compute_uv=False)[:, -1]
    component.margin = float(sigma.min())
    return component.margin


def hausdorff(a, b):
    "Symmetric Hausdorff distance between two point sets."
    if len(a) == 0 or len(b) == 0:
        return np.inf
    da, _ = cKDTree(b).query(a)
    db, _ = cKDTree(a).query(b)
    return float(max(da.max(), db.max()))


def reference_components(target, grid, step=1e-4):
    "Nodal components of a target wave on ``grid``, with their stability margins."
    comps = nodal_extract(grid, target)
    for comp in comps:
        stability_margin(target, comp, step)
    return comps


def _same_topology(a, b):
    return a.kind == b.kind and a.euler == b.euler and a.genus == b.genus and a.closed == b.closed


def localized_nodal_check(psi, chart, references, grid, tol=0.25, step=1e-4, extracted=None):
    """
    Match the nodal components of a rescaled eigenfunction to reference components.

    The field :math:`x\\mapsto\\psi(\\Psi^{-1}(x/N))` is sampled on ``grid`` and its components extracted. Each
    reference is matched to the extracted component of identical topology (kind, Euler characteristic, genus and
    closedness) that is nearest in Hausdorff distance, provided that distance is at most ``tol``.

    Parameters
    ----------
    psi : :class:`~eigenloc.sphere.SphereEigenfunction` or :class:`~eigenloc.torus.TorusEigenfunction`
        Anything with ``N`` and a ``rescaled(chart)`` method.

    chart : object
        Chart of the manifold around the localization point.

    references : list of :class:`NodalComponent`
        Components of the target, e.g. from :func:`reference_components`.

    grid : :class:`~eigenloc.analysis.EvaluationGrid`
        Evaluation grid in chart co-ordinates.

    tol : float, optional
        Largest Hausdorff distance accepted for a match.

    step : float, optional
        Difference step of the stability margins.

    extracted : list of :class:`NodalComponent`, optional
        Components of the rescaled field already extracted on ``grid``; their margins are filled in.

    Returns
    -------
    dict
        ``N``, ``matched`` (whether every reference was matched), ``matches`` and ``mismatches`` (lists of dicts), and
        ``extracted`` (summaries of all extracted components).
    """
    field = psi.rescaled(chart)
    comps = nodal_extract(grid, field) if extracted is None else extracted
    for comp in comps:
        if comp.kind != "points" and comp.margin is None:
            stability_margin(field, comp, step)

    matches, mismatches = [], []
    used = set()
    for i, ref in enumerate(references):
        best, best_d = None, np.inf
        for j, comp in enumerate(comps):
            if j in used or not _same_topology(ref, comp):
                continue
            d = hausdorff(ref.vertices, comp.vertices)
            if d < best_d:
                best, best_d = j, d
        if best is not None and best_d <= tol:
            used.add(best)
            matches.append({"reference": i, "component": best, "euler": comps[best].euler,
                            "genus": comps[best].genus, "hausdorff": best_d, "margin": comps[best].margin,
                            "reference_margin": ref.margin})
        else:
            reason = "no component with the same topology" if best is None else \
                "nearest component at Hausdorff distance %.3g > %.3g" % (best_d, tol)
            mismatches.append({"reference": i, "euler": ref.euler, "genus": ref.genus, "reason": reason})

    if mismatches:
        logger.warning("N=%s: %s of %s reference components unmatched", psi.N, len(mismatches), len(references))
    return {"N": psi.N, "matched": not mismatches and bool(references), "matches": matches,
            "mismatches": mismatches, "extracted": [c.summary() for c in comps]}
