"""Geometric heat-map detectors and the remote detector protocol.

A detector turns a mesh into one scalar per vertex. Canonical heat maps
hold values in [0, 1] where either the maximum is exactly 1 or every
value is 0 (nothing detected). Two detectors are built in:

* ``builtin:saliency`` flags regions whose curvature stands out from
  its surroundings across several smoothing scales;
* ``builtin:defect`` flags rough spots where vertex normals disagree
  with their one-ring neighborhood.

Remote detectors are HTTP endpoints receiving the mesh as flat
coordinate and index lists and answering with per-vertex values; their
replies are canonicalized on receipt. See ``run_detector``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
import requests

from . import _accel
from .errors import (
    DegenerateMeshError,
    DetectorTimeoutError,
    DetectorUnknownError,
    DetectorUnreachableError,
    MeshMismatchError,
    ProtocolError,
)
from .mesh import TriangleMesh, bounding_box, compute_vertex_normals, face_areas
from .selection import SelectionSet

SALIENCY_NAME = "builtin:saliency"
DEFECT_NAME = "builtin:defect"
DEFAULT_TIMEOUT = 120.0

# base smoothing scale as a fraction of the bounding-box diagonal; the
# default scale set is {2, 3, 4, 5, 6} times this
SALIENCY_EPSILON = 0.003

# a curvature field whose largest value is below this (relative to the
# bounding-box diagonal) is treated as flat: saliency is all zero
_FLAT_CURVATURE = 1e-6


@dataclass(frozen=True, eq=False)
class HeatMap:
    """Canonical per-vertex scalar field on a mesh.

    Values are float64 in [0, 1]; either the maximum equals 1 exactly or
    all values are 0. The array is read-only.
    """

    mesh_id: str
    detector: str
    values: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise ValueError(f"heat map values must be 1-D, got shape {vals.shape}")
        if not np.isfinite(vals).all():
            raise ValueError("heat map values must be finite")
        if vals.size and (vals.min() < 0.0 or vals.max() > 1.0):
            raise ValueError("heat map values must lie in [0, 1]")
        if vals.size and vals.max() != 1.0 and vals.any():
            raise ValueError("heat map must peak at 1 unless it is all zero")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def vertex_count(self) -> int:
        return int(self.values.shape[0])


def _normalize_minmax(raw: np.ndarray) -> np.ndarray:
    """Min-max rescale to canonical form; constant fields become zero."""
    raw = np.asarray(raw, dtype=np.float64)
    if raw.size == 0:
        return raw.copy()
    lo = raw.min()
    hi = raw.max()
    if hi - lo <= 0.0:
        return np.zeros_like(raw)
    return (raw - lo) / (hi - lo)


def mean_curvature(mesh: TriangleMesh) -> np.ndarray:
    """Absolute mean curvature per vertex, in 1/length units.

    Interior vertices use the cotangent Laplace-Beltrami operator with
    mixed Voronoi areas, so a unit sphere yields 1 and a plane yields 0
    up to round-off. Vertices on a boundary (an edge with a single
    incident face) fall back to a uniform-weight one-ring estimate with
    a third of the incident face area; isolated vertices get 0. The
    Laplacian is projected onto the vertex normal, which suppresses the
    tangential drift irregular one-rings otherwise leak into the
    magnitude (flat boundaries come out exactly zero).
    """
    pos = mesh.positions
    f = mesh.faces
    nv = pos.shape[0]
    if f.shape[0] == 0:
        return np.zeros(nv)
    vnormals = compute_vertex_normals(mesh).normals
    v0 = pos[f[:, 0]]
    v1 = pos[f[:, 1]]
    v2 = pos[f[:, 2]]

    # cot(angle at corner i) = dot of the two edges leaving corner i
    # over twice the face area
    dot0 = np.einsum("ij,ij->i", v1 - v0, v2 - v0)
    dot1 = np.einsum("ij,ij->i", v2 - v1, v0 - v1)
    dot2 = np.einsum("ij,ij->i", v0 - v2, v1 - v2)
    cn = np.linalg.norm(np.cross(v1 - v0, v2 - v0), axis=1)
    ok = cn > 1e-30
    safe = np.where(ok, cn, 1.0)
    cot0 = np.where(ok, dot0 / safe, 0.0)
    cot1 = np.where(ok, dot1 / safe, 0.0)
    cot2 = np.where(ok, dot2 / safe, 0.0)
    area = 0.5 * cn

    # mixed Voronoi area (Meyer et al. style): the Voronoi formula in
    # non-obtuse triangles, area/2 at the obtuse corner and area/4 at
    # the other two otherwise
    l0 = np.einsum("ij,ij->i", v1 - v0, v1 - v0)
    l1 = np.einsum("ij,ij->i", v2 - v1, v2 - v1)
    l2 = np.einsum("ij,ij->i", v0 - v2, v0 - v2)
    nonobtuse = (dot0 >= 0.0) & (dot1 >= 0.0) & (dot2 >= 0.0)
    a0 = np.where(nonobtuse, (l2 * cot1 + l0 * cot2) / 8.0,
                  np.where(dot0 < 0.0, area / 2.0, area / 4.0))
    a1 = np.where(nonobtuse, (l0 * cot2 + l1 * cot0) / 8.0,
                  np.where(dot1 < 0.0, area / 2.0, area / 4.0))
    a2 = np.where(nonobtuse, (l1 * cot0 + l2 * cot1) / 8.0,
                  np.where(dot2 < 0.0, area / 2.0, area / 4.0))
    a0 = np.where(ok, a0, 0.0)
    a1 = np.where(ok, a1, 0.0)
    a2 = np.where(ok, a2, 0.0)
    mixed = (np.bincount(f[:, 0], weights=a0, minlength=nv)
             + np.bincount(f[:, 1], weights=a1, minlength=nv)
             + np.bincount(f[:, 2], weights=a2, minlength=nv))

    # cotangent Laplacian: edge (i, j) weighted by the cot of the angle
    # opposite it, accumulated from both endpoints
    src = np.concatenate([f[:, 0], f[:, 1], f[:, 1], f[:, 2], f[:, 2], f[:, 0]])
    dst = np.concatenate([f[:, 1], f[:, 0], f[:, 2], f[:, 1], f[:, 0], f[:, 2]])
    w = np.concatenate([cot2, cot2, cot0, cot0, cot1, cot1])
    lap = np.empty((nv, 3))
    delta = pos[dst] - pos[src]
    for c in range(3):
        lap[:, c] = np.bincount(src, weights=w * delta[:, c], minlength=nv)
    along = np.abs(np.einsum("ij,ij->i", lap, vnormals))
    h = np.where(mixed > 1e-300, along / (4.0 * np.maximum(mixed, 1e-300)), 0.0)

    # boundary vertices: uniform weights over the one-ring, one third of
    # the incident face area
    und = np.sort(np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]]), axis=1)
    uniq, counts = np.unique(und, axis=0, return_counts=True)
    rim = uniq[counts == 1]
    if rim.size:
        on_rim = np.zeros(nv, dtype=bool)
        on_rim[rim.ravel()] = True
        lap_u = np.empty((nv, 3))
        a = uniq[:, 0]
        b = uniq[:, 1]
        both_src = np.concatenate([a, b])
        both_dst = np.concatenate([b, a])
        du = pos[both_dst] - pos[both_src]
        for c in range(3):
            lap_u[:, c] = np.bincount(both_src, weights=du[:, c], minlength=nv)
        fa = face_areas(mesh)
        ring = (np.bincount(f[:, 0], weights=fa, minlength=nv)
                + np.bincount(f[:, 1], weights=fa, minlength=nv)
                + np.bincount(f[:, 2], weights=fa, minlength=nv)) / 3.0
        along_u = np.abs(np.einsum("ij,ij->i", lap_u, vnormals))
        hu = np.where(ring > 1e-300, along_u / (4.0 * np.maximum(ring, 1e-300)), 0.0)
        h = np.where(on_rim, hu, h)
    return h


def _gaussian_smooth(pos: np.ndarray, vals: np.ndarray, sigmas,
                     lo: np.ndarray, extent: np.ndarray) -> dict:
    """Gaussian-weighted means of vals over the vertices within 2*sigma
    of each vertex (Euclidean), including the vertex itself.

    All sigmas share one pass over the vertex pairs, binned at the
    widest cutoff. Returns a dict keyed by sigma."""
    sig = np.sort(np.unique(np.asarray(sigmas, dtype=np.float64)))[::-1]
    cutoff = 2.0 * sig[0]
    # half-cutoff cells trim the corner excess of the 3x3x3 box search
    # the cutoff-sized cells would need; the floor caps the cell-count
    # blowup for very small custom scales
    cell = max(cutoff / 2.0, float(extent.max()) / 128.0, 1e-300)
    ncell = np.minimum(np.floor(extent / cell).astype(np.int64) + 1, 2**20)
    nx, ny, nz = int(ncell[0]), int(ncell[1]), int(ncell[2])
    ix = np.minimum((pos[:, 0] - lo[0]) // cell, nx - 1).astype(np.int64)
    iy = np.minimum((pos[:, 1] - lo[1]) // cell, ny - 1).astype(np.int64)
    iz = np.minimum((pos[:, 2] - lo[2]) // cell, nz - 1).astype(np.int64)
    ids = (iz * ny + iy) * nx + ix
    order = np.argsort(ids, kind="stable")
    cell_start = np.zeros(nx * ny * nz + 1, dtype=np.int64)
    np.cumsum(np.bincount(ids, minlength=nx * ny * nz), out=cell_start[1:])

    num = np.zeros((sig.size, pos.shape[0]))
    den = np.zeros((sig.size, pos.shape[0]))
    _accel._gauss_pairs(
        np.ascontiguousarray(pos[:, 0]), np.ascontiguousarray(pos[:, 1]),
        np.ascontiguousarray(pos[:, 2]), np.ascontiguousarray(vals),
        order, cell_start, nx, ny, nz,
        1.0 / (2.0 * sig * sig), (2.0 * sig) ** 2, num, den,
    )
    return {float(s): (vals + num[i]) / (1.0 + den[i])
            for i, s in enumerate(sig)}


def saliency_map(mesh: TriangleMesh, scales=None) -> HeatMap:
    """Multi-scale curvature saliency, canonical per-vertex heat map.

    The mean-curvature field is smoothed with Gaussian weights at each
    scale sigma and at 2*sigma over the Euclidean 2*sigma neighborhood;
    the absolute differences are summed over scales and min-max
    normalized. With ``scales=None`` the scale set is {2, 3, 4, 5, 6}
    times 0.003 of the bounding-box diagonal.

    Flat geometry (curvature everywhere below 1e-6 of the reciprocal
    diagonal) and featureless fields normalize to all zero.

    Raises:
        DegenerateMeshError: the mesh has a zero bounding-box diagonal.
    """
    box = bounding_box(mesh)
    diag = float(np.linalg.norm(box.hi - box.lo))
    if diag <= 0.0:
        raise DegenerateMeshError("mesh bounding box has zero diagonal")
    if scales is None:
        base = SALIENCY_EPSILON * diag
        scales = [k * base for k in (2, 3, 4, 5, 6)]
    scales = [float(s) for s in scales]
    if not scales or any(not np.isfinite(s) or s <= 0.0 for s in scales):
        raise ValueError(f"scales must be positive and finite, got {scales!r}")

    h = mean_curvature(mesh)
    if h.max() * diag < _FLAT_CURVATURE:
        return HeatMap(mesh.name, SALIENCY_NAME, np.zeros(mesh.vertex_count))

    sigmas = sorted({s for s in scales} | {2.0 * s for s in scales})
    smoothed = _gaussian_smooth(mesh.positions, h, sigmas, box.lo,
                                box.hi - box.lo)
    raw = np.zeros(mesh.vertex_count)
    for s in scales:
        raw += np.abs(smoothed[s] - smoothed[2.0 * s])
    return HeatMap(mesh.name, SALIENCY_NAME, _normalize_minmax(raw))


def defect_map(mesh: TriangleMesh) -> HeatMap:
    """Normal-disagreement roughness, canonical per-vertex heat map.

    Per vertex, roughness is one minus the mean cosine between its
    normal and its one-ring neighbors' normals. The field is centered
    by its median, scaled by 1.4826 times the median absolute deviation
    (falling back to plain centering when the MAD is zero), clamped at
    +3, and min-max normalized. Smooth meshes normalize to all zero.
    """
    nv = mesh.vertex_count
    if mesh.normals is not None:
        normals = np.asarray(mesh.normals, dtype=np.float64)
        norms = np.linalg.norm(normals, axis=1, keepdims=True)
        normals = np.where(norms > 1e-300, normals / np.maximum(norms, 1e-300), 0.0)
    else:
        normals = compute_vertex_normals(mesh).normals
    f = mesh.faces
    if f.shape[0] == 0:
        return HeatMap(mesh.name, DEFECT_NAME, np.zeros(nv))

    und = np.sort(np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]]), axis=1)
    uniq = np.unique(und, axis=0)
    src = np.concatenate([uniq[:, 0], uniq[:, 1]])
    dst = np.concatenate([uniq[:, 1], uniq[:, 0]])
    cos = np.clip(np.einsum("ij,ij->i", normals[src], normals[dst]), -1.0, 1.0)
    degree = np.bincount(src, minlength=nv).astype(np.float64)
    total = np.bincount(src, weights=cos, minlength=nv)
    mean_cos = np.where(degree > 0, total / np.maximum(degree, 1.0), 1.0)
    rough = np.maximum(1.0 - mean_cos, 0.0)
    if rough.max() <= 1e-9:
        return HeatMap(mesh.name, DEFECT_NAME, np.zeros(nv))

    med = np.median(rough)
    mad = np.median(np.abs(rough - med))
    if mad > 0.0:
        z = (rough - med) / (1.4826 * mad)
    else:
        z = rough - med
    z = np.minimum(z, 3.0)
    return HeatMap(mesh.name, DEFECT_NAME, _normalize_minmax(z))


def heatmap_to_selection(mesh: TriangleMesh, heatmap: HeatMap,
                         threshold: float) -> SelectionSet:
    """Faces whose mean vertex value meets the threshold.

    A face is selected when the arithmetic mean of its three vertex
    values is >= threshold. Lower thresholds therefore select supersets
    of higher ones.

    Raises:
        ValueError: threshold outside [0, 1].
        MeshMismatchError: the heat map has the wrong vertex count, or
            names a different mesh.
    """
    thr = float(threshold)
    if not np.isfinite(thr) or thr < 0.0 or thr > 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold!r}")
    if heatmap.vertex_count != mesh.vertex_count:
        raise MeshMismatchError(
            f"heat map has {heatmap.vertex_count} values, mesh has "
            f"{mesh.vertex_count} vertices"
        )
    if heatmap.mesh_id and mesh.name and heatmap.mesh_id != mesh.name:
        raise MeshMismatchError(
            f"heat map targets mesh {heatmap.mesh_id!r}, got {mesh.name!r}"
        )
    per_face = heatmap.values[mesh.faces].mean(axis=1)
    faces = np.nonzero(per_face >= thr)[0]
    return SelectionSet(heatmap.mesh_id, frozenset(int(i) for i in faces))


@dataclass(frozen=True)
class DetectorDescriptor:
    """Registry entry for a detector.

    Builtins have an empty endpoint and run in process; anything else is
    POSTed to over HTTP.
    """

    name: str
    endpoint: str = ""
    description: str = ""
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self):
        # names become cache file names, so keep them filename-safe
        if (not isinstance(self.name, str)
                or not re.fullmatch(r"[A-Za-z0-9._:-]+", self.name)
                or set(self.name) == {"."}):
            raise ValueError(f"detector name must match [A-Za-z0-9._:-]+, got {self.name!r}")
        if not (np.isfinite(self.timeout) and self.timeout > 0):
            raise ValueError(f"timeout must be positive, got {self.timeout!r}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "endpoint": self.endpoint,
            "description": self.description,
            "timeout": self.timeout,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DetectorDescriptor":
        return cls(
            name=d["name"],
            endpoint=d.get("endpoint", ""),
            description=d.get("description", ""),
            timeout=float(d.get("timeout", DEFAULT_TIMEOUT)),
        )


def builtin_detectors() -> dict:
    """Fresh registry holding the two in-process detectors."""
    return {
        SALIENCY_NAME: DetectorDescriptor(
            SALIENCY_NAME,
            description="multi-scale curvature saliency",
        ),
        DEFECT_NAME: DetectorDescriptor(
            DEFECT_NAME,
            description="one-ring normal roughness",
        ),
    }


def _canonicalize(values: np.ndarray) -> np.ndarray:
    """Accept already-canonical fields unchanged, otherwise min-max
    normalize (constants collapse to zero)."""
    if values.size == 0:
        return values
    lo = values.min()
    hi = values.max()
    if lo >= 0.0 and hi <= 1.0 and (hi == 1.0 or not values.any()):
        return values
    return _normalize_minmax(values)


def run_detector(registry, name: str, mesh: TriangleMesh, model_id: str = "",
                 timeout: float | None = None) -> HeatMap:
    """Run a registered detector on a mesh and canonicalize the result.

    Remote detectors receive ``{"mesh": {"positions": [...], "faces":
    [...]}, "model_id": ...}`` with flat row-major lists, and must
    answer 200 with ``{"values": [...]}``, one finite number per vertex.

    Args:
        registry: mapping of detector name to DetectorDescriptor.
        name: registered detector name.
        mesh: the mesh to analyze.
        model_id: identifier sent to remote detectors and stamped on
            the returned heat map.
        timeout: per-call override of the descriptor timeout, seconds.

    Raises:
        DetectorUnknownError: name not in the registry.
        DetectorUnreachableError: connection failure or non-200 answer
            (the response body is carried when there is one).
        DetectorTimeoutError: no answer within the timeout.
        ProtocolError: malformed reply, wrong value count, or
            non-finite values.
    """
    desc = registry.get(name)
    if desc is None:
        raise DetectorUnknownError(f"unknown detector {name!r}")
    mesh_id = model_id or mesh.name

    if not desc.endpoint:
        if name == SALIENCY_NAME:
            hm = saliency_map(mesh)
        elif name == DEFECT_NAME:
            hm = defect_map(mesh)
        else:
            raise DetectorUnknownError(f"detector {name!r} has no endpoint and no builtin")
        return HeatMap(mesh_id, name, hm.values)

    payload = {
        "mesh": {
            "positions": np.asarray(mesh.positions, dtype=np.float64).ravel().tolist(),
            "faces": np.asarray(mesh.faces, dtype=np.int64).ravel().tolist(),
        },
        "model_id": mesh_id,
    }
    wait = desc.timeout if timeout is None else float(timeout)
    try:
        resp = requests.post(desc.endpoint, json=payload, timeout=wait)
    except requests.Timeout:
        raise DetectorTimeoutError(
            f"detector {name!r} at {desc.endpoint} gave no answer within {wait:g}s"
        )
    except requests.RequestException as exc:
        raise DetectorUnreachableError(f"detector {name!r} unreachable: {exc}")
    if resp.status_code != 200:
        raise DetectorUnreachableError(
            f"detector {name!r} answered HTTP {resp.status_code}",
            body=resp.text,
        )
    try:
        doc = resp.json()
    except ValueError:
        raise ProtocolError(f"detector {name!r} answered non-JSON content")
    if not isinstance(doc, dict) or "values" not in doc:
        raise ProtocolError(f"detector {name!r} reply lacks a 'values' member")
    try:
        values = np.asarray(doc["values"], dtype=np.float64)
    except (TypeError, ValueError):
        raise ProtocolError(f"detector {name!r} values are not numeric")
    if values.ndim != 1 or values.shape[0] != mesh.vertex_count:
        raise ProtocolError(
            f"detector {name!r} returned {values.size} values for "
            f"{mesh.vertex_count} vertices"
        )
    if not np.isfinite(values).all():
        raise ProtocolError(f"detector {name!r} returned non-finite values")
    return HeatMap(mesh_id, name, _canonicalize(values))
