"""Bounding-volume hierarchy over mesh faces and ray queries against it.

The tree is a median-split BVH: at every internal node the faces are
split at the median of their centroids along the longest
centroid-extent axis, stopping at 8 faces per leaf. The build is fully
deterministic for a given mesh (ties in centroid coordinates are broken
by face id), so identical mesh bytes always produce identical trees and
identical hit results.

Intersection follows Moller-Trumbore with fixed tolerances: rays with
|det| < 1e-12 are treated as parallel, barycentric bounds are edge
inclusive (u >= 0, v >= 0, u + v <= 1 + 1e-9), and t < 0 is rejected.
For nearest queries, hits whose t lies within 1e-9 of the minimal t
form a tie group resolved toward the smallest face id.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _accel
from .mesh import TriangleMesh

DET_EPS = _accel.DET_EPS
T_TIE = _accel.T_TIE


@dataclass(frozen=True, eq=False)
class Ray:
    """Origin plus unit direction.

    Raises ValueError when the direction is not unit length within
    1e-9. Use normalization at the call site for raw vectors.
    """

    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.origin, dtype=np.float64).reshape(3)
        d = np.asarray(self.direction, dtype=np.float64).reshape(3)
        n = float(np.linalg.norm(d))
        if abs(n - 1.0) > 1e-9:
            raise ValueError(f"ray direction must be unit length, got |d| = {n!r}")
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "direction", d)


@dataclass(frozen=True)
class Hit:
    face_id: int
    t: float
    bary_u: float
    bary_v: float


@dataclass(frozen=True, eq=False)
class BVH:
    """Flat-array BVH. ``left < 0`` marks a leaf over prim rows
    [start, start+count); ``prim`` maps rows to original face ids."""

    node_lo: np.ndarray
    node_hi: np.ndarray
    left: np.ndarray
    right: np.ndarray
    start: np.ndarray
    count: np.ndarray
    prim: np.ndarray
    tv0: np.ndarray = field(repr=False)
    tv1: np.ndarray = field(repr=False)
    tv2: np.ndarray = field(repr=False)

    @property
    def node_count(self) -> int:
        return self.node_lo.shape[0]

    @property
    def face_count(self) -> int:
        return self.prim.shape[0]

    def leaf_face_sets(self) -> list[np.ndarray]:
        """Original face ids per leaf, for partition checks."""
        out = []
        for n in range(self.node_count):
            if self.left[n] < 0:
                s = int(self.start[n])
                out.append(np.sort(self.prim[s:s + int(self.count[n])]))
        return out


def build_bvh(mesh: TriangleMesh) -> BVH:
    """Build the median-split BVH for a mesh."""
    c0 = mesh.positions[mesh.faces[:, 0]]
    c1 = mesh.positions[mesh.faces[:, 1]]
    c2 = mesh.positions[mesh.faces[:, 2]]
    tlo = np.minimum(np.minimum(c0, c1), c2)
    thi = np.maximum(np.maximum(c0, c1), c2)
    cent = (c0 + c1 + c2) / 3.0

    nlo, nhi, left, right, start, count, prim = _accel._build_kernel(tlo, thi, cent)
    return BVH(
        node_lo=nlo, node_hi=nhi, left=left, right=right,
        start=start, count=count, prim=prim,
        tv0=np.ascontiguousarray(c0[prim]),
        tv1=np.ascontiguousarray(c1[prim]),
        tv2=np.ascontiguousarray(c2[prim]),
    )


def ray_triangle_intersect(ray: Ray, v0, v1, v2):
    """Single Moller-Trumbore test; returns (t, u, v) or None.

    Shares the exact arithmetic and tolerances of the BVH kernels, so a
    brute-force scan built on this function agrees with traversal
    bit-for-bit.
    """
    v0 = np.asarray(v0, dtype=np.float64)
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    o = ray.origin
    d = ray.direction
    hit, t, u, v = _accel._mt(
        v0[0], v0[1], v0[2], v1[0], v1[1], v1[2], v2[0], v2[1], v2[2],
        o[0], o[1], o[2], d[0], d[1], d[2],
    )
    if not hit:
        return None
    return float(t), float(u), float(v)


def raycast_nearest(bvh: BVH, mesh: TriangleMesh, ray: Ray) -> Hit | None:
    """Nearest hit along the ray, ties within 1e-9 resolved to the
    smallest face id. Returns None on a miss."""
    o = ray.origin
    d = ray.direction
    f, t, u, v = _accel._raycast_nearest_kernel(
        bvh.node_lo, bvh.node_hi, bvh.left, bvh.right, bvh.start, bvh.count,
        bvh.prim, bvh.tv0, bvh.tv1, bvh.tv2,
        o[0], o[1], o[2], d[0], d[1], d[2],
    )
    if f < 0:
        return None
    return Hit(face_id=int(f), t=float(t), bary_u=float(u), bary_v=float(v))


def raycast_nearest_batch(bvh: BVH, origins: np.ndarray, directions: np.ndarray):
    """Vectorized nearest casts.

    Args:
        origins: (N, 3) float64 ray origins.
        directions: (N, 3) float64 unit directions.

    Returns:
        (face_ids, t, u, v) arrays; face_id -1 marks a miss.
    """
    origins = np.ascontiguousarray(origins, dtype=np.float64)
    directions = np.ascontiguousarray(directions, dtype=np.float64)
    n = origins.shape[0]
    out_f = np.empty(n, np.int64)
    out_t = np.empty(n, np.float64)
    out_u = np.empty(n, np.float64)
    out_v = np.empty(n, np.float64)
    _accel._raycast_nearest_batch_kernel(
        bvh.node_lo, bvh.node_hi, bvh.left, bvh.right, bvh.start, bvh.count,
        bvh.prim, bvh.tv0, bvh.tv1, bvh.tv2,
        origins, directions, out_f, out_t, out_u, out_v,
    )
    return out_f, out_t, out_u, out_v


def raycast_all(bvh: BVH, mesh: TriangleMesh, ray: Ray) -> list[Hit]:
    """Every hit along the ray, sorted ascending by t, then face id."""
    o = ray.origin
    d = ray.direction
    cap = 256
    while True:
        out_f = np.empty(cap, np.int64)
        out_t = np.empty(cap, np.float64)
        out_u = np.empty(cap, np.float64)
        out_v = np.empty(cap, np.float64)
        n = _accel._raycast_all_kernel(
            bvh.node_lo, bvh.node_hi, bvh.left, bvh.right, bvh.start, bvh.count,
            bvh.prim, bvh.tv0, bvh.tv1, bvh.tv2,
            o[0], o[1], o[2], d[0], d[1], d[2],
            out_f, out_t, out_u, out_v,
        )
        if n <= cap:
            break
        cap = n
    order = np.lexsort((out_f[:n], out_t[:n]))
    return [
        Hit(face_id=int(out_f[i]), t=float(out_t[i]),
            bary_u=float(out_u[i]), bary_v=float(out_v[i]))
        for i in order
    ]
