"""Convex-hull geometry: hull construction, point classification, the
six-part intersection matrix between two objects, and touch detection.

Conventions used throughout:
  * clouds are (N, 3) float64 arrays in meters, y is the vertical axis;
  * face planes satisfy a*x + b*y + c*z + d = 0 with the unit normal
    (a, b, c) pointing outward, so every hull vertex has signed distance <= 0;
  * a point is Interior when it is strictly inside every face plane,
    Boundary when it sits within the tolerance band of some plane and
    outside none, Exterior otherwise.

Hulls are built with a gift-wrapping sweep: faces are discovered one
supporting plane at a time by rotating around exposed boundary edges.
Coplanar point sets are gathered into a single polygon and fan-triangulated
so that square faces (boxes are everywhere in this domain) come out as a
closed, consistently oriented triangle surface.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .config import GeometryConfig

DEFAULT_GEOMETRY = GeometryConfig()

# Plane-side tolerance used internally while wrapping; matches the hull
# invariant tolerance rather than any user-facing knob.
_EPS_PLANE = 1e-9
_EPS_LINE = 1e-9


class GeometryError(Exception):
    pass


class EmptyCloud(GeometryError):
    """Raised when an operation needs at least one point."""


class DegenerateCloud(GeometryError):
    """Cloud has fewer than four points or is coplanar/collinear.

    Callers that must produce some volume anyway should fall back to
    :func:`hull_with_fallback`, which inflates the bounding box.
    """


class RegionClass(IntEnum):
    INTERIOR = 0
    BOUNDARY = 1
    EXTERIOR = 2


@dataclass(frozen=True)
class Plane:
    a: float
    b: float
    c: float
    d: float

    def signed_distance(self, p) -> float:
        x, y, z = p
        return self.a * x + self.b * y + self.c * z + self.d


@dataclass(frozen=True)
class Aabb:
    min_corner: np.ndarray
    max_corner: np.ndarray

    def contains(self, pts, tol: float = 0.0) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.float64)
        return np.all((pts >= self.min_corner - tol) & (pts <= self.max_corner + tol), axis=-1)

    def extent(self) -> np.ndarray:
        return self.max_corner - self.min_corner

    def center(self) -> np.ndarray:
        return (self.max_corner + self.min_corner) / 2.0


@dataclass(frozen=True)
class ConvexHull:
    """Triangulated boundary surface of a point cloud.

    vertices        (V, 3) coordinates of hull vertices (a subset of the input cloud)
    vertex_indices  (V,) index of each vertex in the original input sequence
    faces           (F, 3) triangles as indices into ``vertices``, outward CCW
    face_planes     (F, 4) rows (a, b, c, d), unit outward normals
    degenerate      True when this hull is an inflated-box stand-in for a flat cloud
    """

    vertices: np.ndarray
    vertex_indices: np.ndarray
    faces: np.ndarray
    face_planes: np.ndarray
    degenerate: bool = False

    @property
    def planes(self) -> list[Plane]:
        return [Plane(*row) for row in self.face_planes]

    def aabb(self) -> Aabb:
        return Aabb(self.vertices.min(axis=0), self.vertices.max(axis=0))

    def translated(self, delta) -> "ConvexHull":
        """Rigid translation; planes shift as d' = d - n . delta."""
        delta = np.asarray(delta, dtype=np.float64)
        planes = self.face_planes.copy()
        planes[:, 3] -= planes[:, :3] @ delta
        return ConvexHull(self.vertices + delta, self.vertex_indices,
                          self.faces, planes, self.degenerate)


def as_cloud(points) -> np.ndarray:
    """Coerce a point sequence to an (N, 3) float array, checking finiteness."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        return pts.reshape(0, 3)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"expected (N, 3) points, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("point coordinates must be finite")
    return pts


def compute_aabb(points) -> Aabb:
    pts = as_cloud(points)
    if pts.shape[0] == 0:
        raise EmptyCloud("cannot build a bounding box from zero points")
    return Aabb(pts.min(axis=0), pts.max(axis=0))


def aabb_gap(a: Aabb, b: Aabb) -> float:
    """Euclidean separation between two boxes (0 when they overlap)."""
    gaps = np.maximum(a.min_corner - b.max_corner, b.min_corner - a.max_corner)
    gaps = np.maximum(gaps, 0.0)
    return float(np.linalg.norm(gaps))



def _cross3(a, b):
    return np.array([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def _cross_rows(a, rows):
    out = np.empty_like(rows)
    out[:, 0] = a[1] * rows[:, 2] - a[2] * rows[:, 1]
    out[:, 1] = a[2] * rows[:, 0] - a[0] * rows[:, 2]
    out[:, 2] = a[0] * rows[:, 1] - a[1] * rows[:, 0]
    return out

def _perp(vecs, e):
    return vecs - np.outer(vecs @ e, e)


def _perp1(vec, e):
    return vec - (vec @ e) * e


def _pivot(pts, anchor, e, v, u):
    """Rotate a half-plane hinged on the (anchor, e) line and return the
    index of the point it meets first, or None if no candidate exists.

    ``v`` is the outward normal of the supporting plane we rotate away from,
    ``u`` points away from that plane's side, both orthogonal to ``e``.
    """
    w = _perp(pts - anchor, e)
    wu = w @ u
    wv = w @ v
    ok = (np.einsum("ij,ij->i", w, w) > _EPS_LINE ** 2)
    ok &= ~((wv >= -_EPS_PLANE) & (wu <= _EPS_PLANE))
    if not np.any(ok):
        return None
    theta = np.where(ok, np.arctan2(wv, wu), -np.inf)
    return int(np.argmax(theta))


def _face_plane(pts, members, anchor, hint):
    """Well-conditioned unit plane through the coplanar member set."""
    rel = pts[members] - anchor
    i1 = int(np.argmax(np.einsum("ij,ij->i", rel, rel)))
    q1 = rel[i1]
    crosses = _cross_rows(q1, rel)
    i2 = int(np.argmax(np.einsum("ij,ij->i", crosses, crosses)))
    n = crosses[i2]
    n = n / np.linalg.norm(n)
    if n @ hint < 0:
        n = -n
    return n, float(-(n @ anchor))


def _chain_2d(coords):
    """CCW boundary loop of 2D points, including collinear boundary points.

    Strict corners come from a standard monotone chain; points lying on a
    boundary edge are then spliced into that edge ordered by edge parameter.
    Interior points are dropped.
    """
    order = np.lexsort((coords[:, 1], coords[:, 0]))

    def build(idx_seq):
        out = []
        for idx in idx_seq:
            while len(out) >= 2:
                o, a = coords[out[-2]], coords[out[-1]]
                b = coords[idx]
                cross = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
                if cross <= _EPS_LINE:
                    out.pop()
                else:
                    break
            out.append(int(idx))
        return out

    lower = build(order)
    upper = build(order[::-1])
    corners = lower[:-1] + upper[:-1]
    if len(corners) < 3:
        return corners
    corner_set = set(corners)
    inserts: list[list[tuple[float, int]]] = [[] for _ in corners]
    for idx in range(coords.shape[0]):
        if idx in corner_set:
            continue
        p = coords[idx]
        for k in range(len(corners)):
            a = coords[corners[k]]
            b = coords[corners[(k + 1) % len(corners)]]
            ab = b - a
            cross = ab[0] * (p[1] - a[1]) - ab[1] * (p[0] - a[0])
            if abs(cross) > _EPS_LINE:
                continue
            denom = ab @ ab
            t = float((p - a) @ ab / denom) if denom > 0 else -1.0
            if 0.0 < t < 1.0:
                inserts[k].append((t, idx))
                break
    loop = []
    for k, corner in enumerate(corners):
        loop.append(corner)
        loop.extend(idx for _, idx in sorted(inserts[k]))
    return loop


def _triangulate_convex_loop(loop, flat):
    """Triangulate a convex CCW loop that may carry collinear boundary points.

    Fan the polygon of strict corners first (always positive area), then
    split each fan triangle whose boundary edge is subdivided by collinear
    points into a sub-fan from the opposite vertex.  Keeps every triangle
    at positive area and every boundary segment on exactly one triangle.
    """
    n = len(loop)

    def turn(a, b, c):
        pa, pb, pc = flat[a], flat[b], flat[c]
        return (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0])

    strict = [i for i in range(n)
              if turn(loop[i - 1], loop[i], loop[(i + 1) % n]) > _EPS_LINE]
    if len(strict) < 3:
        raise GeometryError("face polygon has no area")
    corners = [loop[i] for i in strict]
    tris = [[corners[0], corners[k], corners[k + 1]]
            for k in range(1, len(corners) - 1)]
    for c_idx in range(len(strict)):
        i0 = strict[c_idx]
        i1 = strict[(c_idx + 1) % len(strict)]
        chain = []
        j = (i0 + 1) % n
        while j != i1:
            chain.append(loop[j])
            j = (j + 1) % n
        if not chain:
            continue
        b, c = loop[i0], loop[i1]
        for t_idx, tri in enumerate(tris):
            if b in tri and c in tri:
                apex = next(v for v in tri if v != b and v != c)
                run = [b] + chain + [c]
                tris[t_idx:t_idx + 1] = [[apex, run[k], run[k + 1]]
                                         for k in range(len(run) - 1)]
                break
        else:
            raise GeometryError("boundary chain lost during triangulation")
    return [tuple(t) for t in tris]


def compute_convex_hull(points, cfg: GeometryConfig = DEFAULT_GEOMETRY) -> ConvexHull:
    """Wrap the convex hull of a 3D cloud.

    Raises DegenerateCloud for fewer than four distinct points or a
    coplanar/collinear cloud; callers wanting a box proxy instead should
    use :func:`hull_with_fallback`.
    """
    pts_in = as_cloud(points)
    if pts_in.shape[0] == 0:
        raise EmptyCloud("no points")
    uniq, first_idx = np.unique(pts_in, axis=0, return_index=True)
    if uniq.shape[0] < 4:
        raise DegenerateCloud(f"need >= 4 distinct points, got {uniq.shape[0]}")
    centered = uniq - uniq.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[2] <= max(_EPS_PLANE, 1e-12 * sv[0]):
        raise DegenerateCloud("cloud is coplanar or collinear")

    pts = uniq
    n_pts = pts.shape[0]
    faces: list[tuple[int, int, int]] = []
    planes: list[tuple[float, float, float, float]] = []
    used: set[tuple[int, int]] = set()
    pending: deque = deque()

    def emit_face(seed_normal, anchor):
        nrm_hint = seed_normal / np.linalg.norm(seed_normal)
        d_hint = float(-(nrm_hint @ anchor))
        dist = pts @ nrm_hint + d_hint
        members = np.flatnonzero(np.abs(dist) <= _EPS_PLANE)
        nrm, d = _face_plane(pts, members, anchor, nrm_hint)
        dist = pts @ nrm + d
        if dist.max() > _EPS_PLANE:
            raise GeometryError("wrapping produced a non-supporting plane")
        members = np.flatnonzero(np.abs(dist) <= _EPS_PLANE)
        # polygon boundary in an in-plane basis, CCW around the outward normal
        t1 = pts[members[int(np.argmax(np.linalg.norm(pts[members] - anchor, axis=1)))]] - anchor
        t1 = t1 / np.linalg.norm(t1)
        t2 = _cross3(nrm, t1)
        rel = pts[members] - anchor
        coords = np.stack([rel @ t1, rel @ t2], axis=1)
        loop = [int(members[k]) for k in _chain_2d(coords)]
        if len(loop) < 3:
            raise GeometryError("degenerate face polygon")
        # stable orientation-preserving triangulation; a plain fan would emit
        # zero-area triangles when boundary runs contain collinear points
        root_pos = min(range(len(loop)), key=lambda k: tuple(pts[loop[k]]))
        loop = loop[root_pos:] + loop[:root_pos]
        flat = {idx: coords[k] for k, idx in
                ((int(k), int(members[k])) for k in range(len(members)))}
        for tri in _triangulate_convex_loop(loop, flat):
            faces.append(tri)
            planes.append((nrm[0], nrm[1], nrm[2], d))
        for k in range(len(loop)):
            i, j = loop[k], loop[(k + 1) % len(loop)]
            used.add((i, j))
            if (j, i) not in used:
                pending.append((j, i, nrm))

    # Bootstrap in two pivots: uniq rows are lexicographically sorted, so
    # pts[0] minimizes (x, y, z) and the vertical line through it admits a
    # supporting plane.  Rotating away from the virtual plane x = x_min
    # yields a genuine hull edge; rotating around that edge yields the
    # first face (unless the edge's supporting plane already holds one).
    anchor0 = pts[0]
    e0 = np.array([0.0, 0.0, 1.0])
    v0 = np.array([-1.0, 0.0, 0.0])
    u0 = _cross3(v0, e0)
    r0 = _pivot(pts, anchor0, e0, v0, u0)
    if r0 is None:
        raise DegenerateCloud("cloud is collinear")
    w0 = _perp1(pts[r0] - anchor0, e0)
    n1 = _cross3(e0, w0)
    n1 = n1 / np.linalg.norm(n1)
    e1 = pts[r0] - anchor0
    e1 = e1 / np.linalg.norm(e1)
    offset = _perp(pts - anchor0, e1)
    off_line = np.einsum("ij,ij->i", offset, offset) > _EPS_LINE ** 2
    on_plane = np.abs((pts - anchor0) @ n1) <= _EPS_PLANE
    if np.any(off_line & on_plane):
        emit_face(n1, anchor0)
    else:
        u1 = _cross3(n1, e1)
        r1 = _pivot(pts, anchor0, e1, n1, u1)
        if r1 is None:
            raise DegenerateCloud("cloud is collinear")
        w1 = _perp1(pts[r1] - anchor0, e1)
        emit_face(_cross3(e1, w1), anchor0)

    guard = 0
    while pending:
        guard += 1
        if guard > 64 * n_pts:
            raise GeometryError("wrapping failed to close the surface")
        i, j, n_known = pending.popleft()
        if (i, j) in used:
            continue
        e = pts[j] - pts[i]
        e = e / np.linalg.norm(e)
        u = _cross3(n_known, e)
        r = _pivot(pts, pts[i], e, n_known, u)
        if r is None:
            raise GeometryError("no supporting plane found at an open edge")
        w = _perp1(pts[r] - pts[i], e)
        emit_face(_cross3(e, w), pts[i])

    vert_ids = sorted({i for tri in faces for i in tri})
    remap = {old: new for new, old in enumerate(vert_ids)}
    tris = np.array([[remap[a] for a in tri] for tri in faces], dtype=np.intp)
    return ConvexHull(
        vertices=pts[vert_ids],
        vertex_indices=first_idx[vert_ids],
        faces=tris,
        face_planes=np.array(planes, dtype=np.float64),
    )


def box_hull(min_corner, max_corner, degenerate: bool = False) -> ConvexHull:
    """Exact hull of an axis-aligned box, bypassing the wrap."""
    lo = np.asarray(min_corner, dtype=np.float64)
    hi = np.asarray(max_corner, dtype=np.float64)
    if np.any(hi <= lo):
        raise DegenerateCloud("box must have positive extent on every axis")
    xs = [lo[0], hi[0]]
    ys = [lo[1], hi[1]]
    zs = [lo[2], hi[2]]
    verts = np.array([[x, y, z] for x in xs for y in ys for z in zs])
    # vertex order: bit 2 = x, bit 1 = y, bit 0 = z
    quads = [
        ((0, 1, 3, 2), (-1, 0, 0, lo[0])),
        ((4, 6, 7, 5), (1, 0, 0, -hi[0])),
        ((0, 4, 5, 1), (0, -1, 0, lo[1])),
        ((2, 3, 7, 6), (0, 1, 0, -hi[1])),
        ((0, 2, 6, 4), (0, 0, -1, lo[2])),
        ((1, 5, 7, 3), (0, 0, 1, -hi[2])),
    ]
    faces, planes = [], []
    for quad, plane in quads:
        a, b, c, d = quad
        faces.extend([(a, b, c), (a, c, d)])
        planes.extend([plane, plane])
    return ConvexHull(
        vertices=verts,
        vertex_indices=np.arange(8, dtype=np.intp),
        faces=np.array(faces, dtype=np.intp),
        face_planes=np.array(planes, dtype=np.float64),
        degenerate=degenerate,
    )


def hull_with_fallback(points, cfg: GeometryConfig = DEFAULT_GEOMETRY) -> ConvexHull:
    """Hull of a cloud, or an inflated-box proxy when the cloud is flat.

    Axes with (near-)zero extent are inflated by eps_touch so thin sheets
    still participate in touch and relation tests; the result is flagged.
    """
    try:
        return compute_convex_hull(points, cfg)
    except DegenerateCloud:
        pts = as_cloud(points)
        if pts.shape[0] == 0:
            raise
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        pad = np.where(hi - lo < cfg.eps_touch, cfg.eps_touch / 2.0, 0.0)
        return box_hull(lo - pad, hi + pad, degenerate=True)


def classify_points(hull: ConvexHull, points, tol: float | None = None,
                    cfg: GeometryConfig = DEFAULT_GEOMETRY) -> np.ndarray:
    """Vectorized region classification of many points against one hull."""
    if tol is None:
        tol = cfg.eps_bnd
    pts = as_cloud(points)
    if pts.shape[0] == 0:
        return np.empty(0, dtype=np.intp)
    worst = (pts @ hull.face_planes[:, :3].T + hull.face_planes[:, 3]).max(axis=1)
    out = np.full(pts.shape[0], RegionClass.BOUNDARY, dtype=np.intp)
    out[worst < -tol] = RegionClass.INTERIOR
    out[worst > tol] = RegionClass.EXTERIOR
    return out


def classify_point(hull: ConvexHull, p, tol: float | None = None,
                   cfg: GeometryConfig = DEFAULT_GEOMETRY) -> RegionClass:
    if tol is not None and tol < 0:
        raise ValueError("tol must be >= 0")
    return RegionClass(int(classify_points(hull, [p], tol, cfg)[0]))


@dataclass(frozen=True)
class RelMatrix:
    """Non-emptiness of the six intersections between two clouds.

    Row one looks at cloud A against the interior / boundary / exterior of
    B's hull; row two looks at cloud B against A's hull.
    """

    a_in_b0: bool
    a_on_db: bool
    a_in_bminus: bool
    a0_has_b: bool
    da_has_b: bool
    aminus_has_b: bool

    def rows(self):
        return ((self.a_in_b0, self.a_on_db, self.a_in_bminus),
                (self.a0_has_b, self.da_has_b, self.aminus_has_b))

    def transposed(self) -> "RelMatrix":
        return RelMatrix(self.a0_has_b, self.da_has_b, self.aminus_has_b,
                         self.a_in_b0, self.a_on_db, self.a_in_bminus)


def _region_flags(cloud, hull, tol):
    bb = hull.aabb()
    inside_bb = bb.contains(cloud, tol)
    flags = [False, False, bool(np.any(~inside_bb))]
    if np.any(inside_bb):
        regions = classify_points(hull, cloud[inside_bb], tol)
        flags[0] |= bool(np.any(regions == RegionClass.INTERIOR))
        flags[1] |= bool(np.any(regions == RegionClass.BOUNDARY))
        flags[2] |= bool(np.any(regions == RegionClass.EXTERIOR))
    return flags


def relation_matrix(cloud_a, hull_a: ConvexHull, cloud_b, hull_b: ConvexHull,
                    cfg: GeometryConfig = DEFAULT_GEOMETRY,
                    tol: float | None = None) -> RelMatrix:
    """Evaluate the six-part matrix over the full clouds (not just vertices).

    ``tol`` widens the boundary band; relation classification passes the
    touch tolerance here so shallow contact overlap does not read as
    interior penetration.
    """
    if tol is None:
        tol = cfg.eps_bnd
    ca, cb = as_cloud(cloud_a), as_cloud(cloud_b)
    r1 = _region_flags(ca, hull_b, tol)
    r2 = _region_flags(cb, hull_a, tol)
    return RelMatrix(r1[0], r1[1], r1[2], r2[0], r2[1], r2[2])


def min_point_distance(cloud_a, cloud_b) -> float:
    ca, cb = as_cloud(cloud_a), as_cloud(cloud_b)
    diff = ca[:, None, :] - cb[None, :, :]
    return float(np.sqrt(np.einsum("ijk,ijk->ij", diff, diff).min()))


# ---------------------------------------------------------------------------
# GJK distance between two convex vertex sets
# ---------------------------------------------------------------------------

def _closest_on_segment(a, b):
    ab = b - a
    denom = ab @ ab
    t = 0.0 if denom <= 0 else float(np.clip(-(a @ ab) / denom, 0.0, 1.0))
    p = a + t * ab
    if t <= 0.0:
        return a, [0]
    if t >= 1.0:
        return b, [1]
    return p, [0, 1]


def _closest_on_triangle(a, b, c):
    ab, ac = b - a, c - a
    ap = -a
    d1, d2 = ab @ ap, ac @ ap
    if d1 <= 0 and d2 <= 0:
        return a, [0]
    bp = -b
    d3, d4 = ab @ bp, ac @ bp
    if d3 >= 0 and d4 <= d3:
        return b, [1]
    vc = d1 * d4 - d3 * d2
    if vc <= 0 <= d1 and d3 <= 0:
        t = d1 / (d1 - d3)
        return a + t * ab, [0, 1]
    cp = -c
    d5, d6 = ab @ cp, ac @ cp
    if d6 >= 0 and d5 <= d6:
        return c, [2]
    vb = d5 * d2 - d1 * d6
    if vb <= 0 <= d2 and d6 <= 0:
        t = d2 / (d2 - d6)
        return a + t * ac, [0, 2]
    va = d3 * d6 - d5 * d4
    if va <= 0 and d4 >= d3 and d5 >= d6:
        t = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return b + t * (c - b), [1, 2]
    denom = va + vb + vc
    v, w = vb / denom, vc / denom
    return a + v * ab + w * ac, [0, 1, 2]


def _closest_on_simplex(simplex):
    if len(simplex) == 1:
        return simplex[0], [0]
    if len(simplex) == 2:
        return _closest_on_segment(simplex[0], simplex[1])
    if len(simplex) == 3:
        return _closest_on_triangle(simplex[0], simplex[1], simplex[2])
    a, b, c, d = simplex
    # origin inside the tetrahedron means the sets intersect
    best, keep, best_d = None, None, np.inf
    inside = True
    for tri, ids in (((a, b, c), [0, 1, 2]), ((a, b, d), [0, 1, 3]),
                     ((a, c, d), [0, 2, 3]), ((b, c, d), [1, 2, 3])):
        p0, p1, p2 = tri
        nrm = np.cross(p1 - p0, p2 - p0)
        other = ({0, 1, 2, 3} - set(ids)).pop()
        side_origin = nrm @ (-p0)
        side_other = nrm @ (simplex[other] - p0)
        if side_origin * side_other < 0:
            inside = False
            p, sub = _closest_on_triangle(*tri)
            dist = p @ p
            if dist < best_d:
                best, keep, best_d = p, [ids[k] for k in sub], dist
    if inside:
        return np.zeros(3), [0, 1, 2, 3]
    return best, keep


def gjk_distance(verts_a, verts_b, eps: float = 1e-12, max_iter: int = 128) -> float:
    """Distance between the convex hulls of two vertex sets (0 if they meet)."""
    A = as_cloud(verts_a)
    B = as_cloud(verts_b)
    v = A.mean(axis=0) - B.mean(axis=0)
    if v @ v < eps:
        return 0.0
    simplex: list[np.ndarray] = []
    witnesses: set[tuple[int, int]] = set()
    for _ in range(max_iter):
        ia = int(np.argmin(A @ v))
        ib = int(np.argmax(B @ v))
        w = A[ia] - B[ib]
        vv = v @ v
        if vv - v @ w <= 1e-10 * max(vv, 1.0) or (ia, ib) in witnesses:
            return float(np.sqrt(vv))
        witnesses.add((ia, ib))
        simplex.append(w)
        p, keep = _closest_on_simplex(simplex)
        simplex = [simplex[k] for k in keep]
        v = p
        if v @ v <= eps:
            return 0.0
    return float(np.linalg.norm(v))


def hull_surface_distance(hull_a: ConvexHull, hull_b: ConvexHull) -> float:
    """Separation between two hulls as convex sets (0 when touching/overlapping)."""
    return gjk_distance(hull_a.vertices, hull_b.vertices)


def touch(cloud_a, hull_a: ConvexHull, cloud_b, hull_b: ConvexHull,
          tol: float | None = None, cfg: GeometryConfig = DEFAULT_GEOMETRY) -> bool:
    """Contact test: interiors mutually free of the other's points (to depth
    tol) and surfaces within tol of each other."""
    if tol is None:
        tol = cfg.eps_touch
    ca, cb = as_cloud(cloud_a), as_cloud(cloud_b)
    if aabb_gap(compute_aabb(ca), compute_aabb(cb)) > tol:
        return False
    if np.any(classify_points(hull_b, ca, tol) == RegionClass.INTERIOR):
        return False
    if np.any(classify_points(hull_a, cb, tol) == RegionClass.INTERIOR):
        return False
    if min_point_distance(ca, cb) <= tol:
        return True
    return hull_surface_distance(hull_a, hull_b) <= tol


# ---------------------------------------------------------------------------
# Derived quantities used by tests and reports
# ---------------------------------------------------------------------------

def hull_volume(hull: ConvexHull) -> float:
    v = hull.vertices
    tris = v[hull.faces]
    return float(np.abs(np.einsum("ij,ij->i", tris[:, 0],
                                  np.cross(tris[:, 1], tris[:, 2])).sum()) / 6.0)


def euler_counts(hull: ConvexHull) -> tuple[int, int, int]:
    """(V, E, F) of the triangulated surface."""
    verts = {int(i) for tri in hull.faces for i in tri}
    edges = set()
    for a, b, c in hull.faces:
        for i, j in ((a, b), (b, c), (c, a)):
            edges.add((min(int(i), int(j)), max(int(i), int(j))))
    return len(verts), len(edges), len(hull.faces)


def directed_edge_multiset(hull: ConvexHull):
    out = []
    for a, b, c in hull.faces:
        out.extend([(int(a), int(b)), (int(b), int(c)), (int(c), int(a))])
    return out
