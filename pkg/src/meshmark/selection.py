"""Screen-space ROI selection: brush strokes and lasso polygons.

Both tools decide face membership by the projected face centroid and
filter the result through an occlusion test, so nothing hidden behind
the foremost surface is ever selected:

* brush: a face is in when its centroid projects within ``radius`` (in
  NDC units) of some stroke sample, or when it is the face directly hit
  by a sample's pick ray (the anchor), and in either case the face must
  pass ``face_visible``. Strokes are densified so consecutive samples
  are at most ``radius/2`` apart; anchors are cast from the original
  samples only, which keeps the selection monotone in the radius.
* lasso: centroid inside the polygon under the even-odd rule, and
  ``face_visible`` holds. Centroids that cannot be projected (nearer
  than the near plane) are never selected.

``face_visible`` casts a ray from the eye toward the face centroid and
requires the nearest hit to be that face, tolerating a different face
at the same depth within 1e-6 relative t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bvh import BVH, raycast_nearest_batch
from .camera import CameraPose, ScreenPoint, pick_ray, project_points
from .errors import InvalidPolygonError, InvalidStrokeError, MeshMismatchError
from .mesh import TriangleMesh, face_centroids

VISIBILITY_REL_TOL = 1e-6


def _as_points(seq, err):
    pts = []
    for p in seq:
        if isinstance(p, ScreenPoint):
            x, y = p.x, p.y
        else:
            try:
                x, y = float(p[0]), float(p[1])
            except (TypeError, ValueError, IndexError):
                raise err(f"malformed screen point {p!r}")
        if not (math.isfinite(x) and math.isfinite(y)):
            raise err(f"non-finite screen point ({x}, {y})")
        if abs(x) > 1.0 or abs(y) > 1.0:
            raise err(f"screen point outside NDC square: ({x}, {y})")
        pts.append((x, y))
    return tuple(pts)


@dataclass(frozen=True)
class BrushStroke:
    """Ordered NDC samples plus a radius in NDC units."""

    samples: tuple
    radius: float

    def __post_init__(self):
        pts = _as_points(self.samples, InvalidStrokeError)
        if len(pts) < 1:
            raise InvalidStrokeError("stroke needs at least one sample")
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise InvalidStrokeError(f"radius must be positive, got {self.radius}")
        object.__setattr__(self, "samples", pts)
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True)
class LassoPolygon:
    """Implicitly closed NDC polygon; self-intersection is allowed and
    resolved by the even-odd rule."""

    vertices: tuple

    def __post_init__(self):
        pts = _as_points(self.vertices, InvalidPolygonError)
        if len(pts) < 3:
            raise InvalidPolygonError("lasso needs at least 3 vertices")
        object.__setattr__(self, "vertices", pts)


@dataclass(frozen=True)
class SelectionSet:
    """A set of face indices on one mesh."""

    mesh_id: str
    faces: frozenset

    def __post_init__(self):
        object.__setattr__(self, "faces", frozenset(int(f) for f in self.faces))

    def sorted_faces(self) -> list[int]:
        return sorted(self.faces)

    def __len__(self) -> int:
        return len(self.faces)


def _check_same_mesh(a: SelectionSet, b: SelectionSet):
    if a.mesh_id != b.mesh_id:
        raise MeshMismatchError(
            f"selections reference different meshes: {a.mesh_id!r} vs {b.mesh_id!r}"
        )


def selection_union(a: SelectionSet, b: SelectionSet) -> SelectionSet:
    _check_same_mesh(a, b)
    return SelectionSet(a.mesh_id, a.faces | b.faces)


def selection_difference(a: SelectionSet, b: SelectionSet) -> SelectionSet:
    _check_same_mesh(a, b)
    return SelectionSet(a.mesh_id, a.faces - b.faces)


def selection_intersect(a: SelectionSet, b: SelectionSet) -> SelectionSet:
    _check_same_mesh(a, b)
    return SelectionSet(a.mesh_id, a.faces & b.faces)


def densify_stroke(samples: np.ndarray, max_spacing: float) -> np.ndarray:
    """Insert evenly spaced points so consecutive samples are at most
    ``max_spacing`` apart. Original samples are kept bit-exact."""
    samples = np.asarray(samples, dtype=np.float64).reshape(-1, 2)
    out = [samples[0]]
    for i in range(samples.shape[0] - 1):
        a = samples[i]
        b = samples[i + 1]
        d = float(np.hypot(b[0] - a[0], b[1] - a[1]))
        n = max(1, int(math.ceil(d / max_spacing)))
        for k in range(1, n):
            out.append(a + (b - a) * (k / n))
        out.append(b)
    return np.array(out)


def point_in_polygon(px: np.ndarray, py: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Even-odd (crossing number) containment test, vectorized.

    Edges are treated half-open in y, the standard construction that
    counts each crossing exactly once regardless of shared vertices.
    """
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    poly = np.asarray(poly, dtype=np.float64)
    x1 = poly[:, 0]
    y1 = poly[:, 1]
    x2 = np.roll(x1, -1)
    y2 = np.roll(y1, -1)

    inside = np.zeros(px.shape[0], dtype=bool)
    chunk = 65536
    with np.errstate(divide="ignore", invalid="ignore"):
        for s in range(0, px.shape[0], chunk):
            cx = px[s:s + chunk, None]
            cy = py[s:s + chunk, None]
            straddles = (y1 > cy) != (y2 > cy)
            xint = x1 + (cy - y1) * (x2 - x1) / (y2 - y1)
            crossings = (straddles & (cx < xint)).sum(axis=1)
            inside[s:s + chunk] = (crossings & 1).astype(bool)
    return inside


def visible_mask(mesh: TriangleMesh, bvh: BVH, camera: CameraPose,
                 face_ids: np.ndarray) -> np.ndarray:
    """Occlusion test for many faces at once; see ``face_visible``."""
    face_ids = np.asarray(face_ids, dtype=np.int64)
    if face_ids.size == 0:
        return np.zeros(0, dtype=bool)
    cents = face_centroids(mesh)[face_ids]
    v = cents - camera.eye
    t_c = np.linalg.norm(v, axis=1)
    ok = t_c > 1e-300
    dirs = np.zeros_like(v)
    dirs[ok] = v[ok] / t_c[ok, None]
    origins = np.broadcast_to(camera.eye, dirs.shape)
    f, t, _, _ = raycast_nearest_batch(bvh, origins, dirs)
    return ok & (f >= 0) & ((f == face_ids) | (np.abs(t - t_c) <= VISIBILITY_REL_TOL * t_c))


def face_visible(mesh: TriangleMesh, bvh: BVH, camera: CameraPose, face_id: int) -> bool:
    """True iff the ray from the eye toward the face centroid first hits
    this face, or another surface at the same depth within 1e-6
    relative t (coincident geometry)."""
    return bool(visible_mask(mesh, bvh, camera, np.array([face_id]))[0])


def _disk_candidates(x: np.ndarray, y: np.ndarray, samples: np.ndarray,
                     radius: float) -> np.ndarray:
    """Indices (into x/y) of points within ``radius`` of any sample.

    Points are binned into a sparse radius-sized grid keyed by packed
    cell ids, so each sample inspects only its 3x3 neighborhood.
    """
    r = radius
    window = (x >= -1.0 - r) & (x <= 1.0 + r) & (y >= -1.0 - r) & (y <= 1.0 + r)
    sub = np.nonzero(window)[0]
    if sub.size == 0:
        return sub
    xs = x[sub]
    ys = y[sub]
    ix = np.floor((xs + 1.0 + r) / r).astype(np.int64)
    iy = np.floor((ys + 1.0 + r) / r).astype(np.int64)
    cid = (ix << 32) | iy
    order = np.argsort(cid, kind="stable")
    scid = cid[order]

    hit = np.zeros(sub.size, dtype=bool)
    r2 = r * r
    for sx, sy in samples:
        jx = int((sx + 1.0 + r) / r)
        jy = int((sy + 1.0 + r) / r)
        for ox in (-1, 0, 1):
            for oy in (-1, 0, 1):
                q = ((jx + ox) << 32) | (jy + oy)
                lo = np.searchsorted(scid, q, side="left")
                hi = np.searchsorted(scid, q, side="right")
                if lo == hi:
                    continue
                pts = order[lo:hi]
                d2 = (xs[pts] - sx) ** 2 + (ys[pts] - sy) ** 2
                hit[pts[d2 <= r2]] = True
    return sub[hit]


def brush_select(mesh: TriangleMesh, bvh: BVH, camera: CameraPose,
                 stroke: BrushStroke, mesh_id: str | None = None) -> SelectionSet:
    """Select visible faces under a brush stroke.

    Membership: (projected centroid within radius of a densified sample,
    or directly hit by an original sample's pick ray) and face_visible.
    """
    orig = np.array(stroke.samples, dtype=np.float64)
    dens = densify_stroke(orig, stroke.radius / 2.0)

    cents = face_centroids(mesh)
    x, y, _, valid = project_points(camera, cents)
    vidx = np.nonzero(valid)[0]
    disk = vidx[_disk_candidates(x[vidx], y[vidx], dens, stroke.radius)] if vidx.size else vidx

    dirs = np.empty((orig.shape[0], 3))
    for i, (sx, sy) in enumerate(orig):
        dirs[i] = pick_ray(camera, ScreenPoint(sx, sy)).direction
    origins = np.broadcast_to(camera.eye, dirs.shape)
    hit_f, _, _, _ = raycast_nearest_batch(bvh, origins, dirs)
    anchors = hit_f[hit_f >= 0]

    cand = np.union1d(disk, anchors).astype(np.int64)
    vis = visible_mask(mesh, bvh, camera, cand)
    mid = mesh_id if mesh_id is not None else mesh.name
    return SelectionSet(mid, frozenset(int(f) for f in cand[vis]))


def lasso_select(mesh: TriangleMesh, bvh: BVH, camera: CameraPose,
                 polygon: LassoPolygon, mesh_id: str | None = None) -> SelectionSet:
    """Select visible faces whose projected centroid falls inside the
    polygon under the even-odd rule."""
    poly = np.array(polygon.vertices, dtype=np.float64)

    cents = face_centroids(mesh)
    x, y, _, valid = project_points(camera, cents)
    vidx = np.nonzero(valid)[0]
    if vidx.size == 0:
        return SelectionSet(mesh_id if mesh_id is not None else mesh.name, frozenset())
    inside = point_in_polygon(x[vidx], y[vidx], poly)
    cand = vidx[inside]
    vis = visible_mask(mesh, bvh, camera, cand)
    mid = mesh_id if mesh_id is not None else mesh.name
    return SelectionSet(mid, frozenset(int(f) for f in cand[vis]))
