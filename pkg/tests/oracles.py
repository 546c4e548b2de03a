"""Independent brute-force reference implementations for equivalence tests.

Everything here deliberately avoids the library's accelerated code
paths: ray casting scans every face with vectorized numpy, projection
goes through explicit view and perspective matrices, and point-in-
polygon is a per-edge crossing loop. Numeric tolerances mirror the
library's documented contracts so results are comparable.
"""

import math

import numpy as np

from meshmark import ScreenPoint, face_centroids, pick_ray
from meshmark.selection import densify_stroke

DET_EPS = 1e-12
BARY_SLACK = 1e-9
T_TIE = 1e-9
VIS_REL_TOL = 1e-6


def mt_all_hits(mesh, origin, direction):
    """All valid ray-triangle hits, brute force over every face.

    Returns (face_ids, t) arrays, unsorted.
    """
    v0 = mesh.positions[mesh.faces[:, 0]]
    v1 = mesh.positions[mesh.faces[:, 1]]
    v2 = mesh.positions[mesh.faces[:, 2]]
    e1 = v1 - v0
    e2 = v2 - v0
    d = np.asarray(direction, dtype=np.float64)
    o = np.asarray(origin, dtype=np.float64)
    pvec = np.cross(d, e2)
    det = np.einsum("ij,ij->i", e1, pvec)
    ok = np.abs(det) >= DET_EPS
    inv = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    tvec = o - v0
    u = np.einsum("ij,ij->i", tvec, pvec) * inv
    qvec = np.cross(tvec, e1)
    v = (qvec @ d) * inv
    t = np.einsum("ij,ij->i", e2, qvec) * inv
    ok &= (u >= 0.0) & (v >= 0.0) & (u + v <= 1.0 + BARY_SLACK) & (t >= 0.0)
    ids = np.nonzero(ok)[0]
    return ids, t[ids]


def nearest_hit(mesh, origin, direction):
    """Nearest hit under the library's tie rule: among hits with
    t <= t_min + 1e-9, the smallest face id wins. Returns (face_id, t)
    or None."""
    ids, ts = mt_all_hits(mesh, origin, direction)
    if ids.size == 0:
        return None
    t_min = ts.min()
    window = ts <= t_min + T_TIE
    cand_ids = ids[window]
    k = np.argmin(cand_ids)
    return int(cand_ids[k]), float(ts[window][k])


def view_projection(camera):
    """Row-vector view and projection matrices built the textbook way."""
    f = camera.look_dir
    r = camera.right
    u = camera.up
    eye = camera.eye
    view = np.array([
        [r[0], u[0], -f[0], 0.0],
        [r[1], u[1], -f[1], 0.0],
        [r[2], u[2], -f[2], 0.0],
        [-eye @ r, -eye @ u, eye @ f, 1.0],
    ])
    tan_half = math.tan(camera.vfov / 2.0)
    n, fa = camera.near, camera.far
    proj = np.array([
        [1.0 / (tan_half * camera.aspect), 0.0, 0.0, 0.0],
        [0.0, 1.0 / tan_half, 0.0, 0.0],
        [0.0, 0.0, (fa + n) / (n - fa), -1.0],
        [0.0, 0.0, 2.0 * fa * n / (n - fa), 0.0],
    ])
    return view, proj


def project_ndc(camera, points):
    """NDC (x, y) plus validity via explicit matrices; points behind the
    near plane are invalid."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    view, proj = view_projection(camera)
    hom = np.concatenate([pts, np.ones((pts.shape[0], 1))], axis=1)
    clip = hom @ view @ proj
    w = clip[:, 3]
    z_eye = -((hom @ view)[:, 2])
    valid = z_eye >= camera.near
    with np.errstate(divide="ignore", invalid="ignore"):
        x = clip[:, 0] / w
        y = clip[:, 1] / w
    return x, y, valid


def point_in_polygon_slow(px, py, poly):
    """Even-odd test, one edge at a time."""
    inside = False
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            x_cross = x1 + (py - y1) / (y2 - y1) * (x2 - x1)
            if px < x_cross:
                inside = not inside
    return inside


def visible_faces(mesh, camera, face_ids):
    """Occlusion filter via brute-force nearest hits through centroids."""
    face_ids = np.asarray(sorted(face_ids), dtype=np.int64)
    cents = face_centroids(mesh)[face_ids]
    out = []
    for fid, c in zip(face_ids, cents):
        v = c - camera.eye
        t_c = float(np.linalg.norm(v))
        if t_c <= 0.0:
            continue
        hit = nearest_hit(mesh, camera.eye, v / t_c)
        if hit is None:
            continue
        hid, ht = hit
        if hid == fid or abs(ht - t_c) <= VIS_REL_TOL * t_c:
            out.append(int(fid))
    return set(out)


def lasso_oracle(mesh, camera, vertices):
    """Faces whose centroid projects inside the polygon and survives the
    visibility filter."""
    cents = face_centroids(mesh)
    x, y, valid = project_ndc(camera, cents)
    poly = [(float(a), float(b)) for a, b in vertices]
    inside = [
        i for i in range(mesh.face_count)
        if valid[i] and point_in_polygon_slow(float(x[i]), float(y[i]), poly)
    ]
    return visible_faces(mesh, camera, inside)


def brush_oracle(mesh, camera, samples, radius):
    """Brush semantics, brute force: a face is in when its centroid
    projects within the stroke radius of a densified sample or the face
    is hit by a ray through an original sample, and it passes the
    visibility filter."""
    samples = [(float(a), float(b)) for a, b in samples]
    dense = densify_stroke(samples, radius / 2.0)
    cents = face_centroids(mesh)
    x, y, valid = project_ndc(camera, cents)

    candidates = set()
    for i in range(mesh.face_count):
        if not valid[i]:
            continue
        for sx, sy in dense:
            if (x[i] - sx) ** 2 + (y[i] - sy) ** 2 <= radius * radius:
                candidates.add(i)
                break
    for sx, sy in samples:
        ray = pick_ray(camera, ScreenPoint(sx, sy))
        hit = nearest_hit(mesh, ray.origin, ray.direction)
        if hit is not None:
            candidates.add(hit[0])
    return visible_faces(mesh, camera, candidates)
