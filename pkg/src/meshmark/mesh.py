"""Triangle mesh container and basic geometric queries.

A :class:`TriangleMesh` is an immutable indexed triangle soup: float64
positions, int64 vertex-index triples, optional per-vertex unit normals
and UV coordinates, and an opaque texture reference. All operations here
are pure functions of their inputs and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import EmptyMeshError, FaceIndexError

_NORMAL_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class AABB:
    """Axis-aligned bounding box; ``lo <= hi`` componentwise."""

    lo: np.ndarray
    hi: np.ndarray

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    def to_dict(self) -> dict:
        return {"min": [float(v) for v in self.lo], "max": [float(v) for v in self.hi]}


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Indexed triangle mesh with optional per-vertex attributes.

    Attributes:
        positions: (V, 3) float64 vertex positions in model units.
        faces: (F, 3) int64 vertex indices, F >= 1.
        normals: optional (V, 3) float64 unit vectors.
        uvs: optional (V, 2) float64 texture coordinates.
        texture_ref: opaque image reference (e.g. material hints captured
            from an OBJ file); never decoded by the core.
        name: display name, usually the source filename.
    """

    positions: np.ndarray
    faces: np.ndarray
    normals: np.ndarray | None = None
    uvs: np.ndarray | None = None
    texture_ref: str | None = None
    name: str = ""
    # memoized derived data; not part of the value
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        pos = np.ascontiguousarray(np.asarray(self.positions, dtype=np.float64))
        fcs = np.ascontiguousarray(np.asarray(self.faces, dtype=np.int64))
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError(f"positions must be (V, 3), got {pos.shape}")
        if fcs.ndim != 2 or fcs.shape[1] != 3:
            raise ValueError(f"faces must be (F, 3), got {fcs.shape}")
        if fcs.shape[0] < 1:
            raise EmptyMeshError("mesh has no faces")
        if fcs.size and (fcs.min() < 0 or fcs.max() >= pos.shape[0]):
            bad = int(np.argmax(((fcs < 0) | (fcs >= pos.shape[0])).any(axis=1)))
            raise FaceIndexError(
                f"face references vertex outside [0, {pos.shape[0]}) (first bad face {bad})"
            )
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "faces", fcs)
        if self.normals is not None:
            nrm = np.ascontiguousarray(np.asarray(self.normals, dtype=np.float64))
            if nrm.shape != pos.shape:
                raise ValueError("normals must match positions shape")
            lengths = np.linalg.norm(nrm, axis=1)
            if np.any(np.abs(lengths - 1.0) > _NORMAL_TOL):
                raise ValueError("normals must be unit length")
            object.__setattr__(self, "normals", nrm)
        if self.uvs is not None:
            uv = np.ascontiguousarray(np.asarray(self.uvs, dtype=np.float64))
            if uv.ndim != 2 or uv.shape != (pos.shape[0], 2):
                raise ValueError("uvs must be (V, 2) matching positions")
            object.__setattr__(self, "uvs", uv)

    @property
    def vertex_count(self) -> int:
        return self.positions.shape[0]

    @property
    def face_count(self) -> int:
        return self.faces.shape[0]

    def corners(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """The three (F, 3) corner position arrays of every face."""
        p, f = self.positions, self.faces
        return p[f[:, 0]], p[f[:, 1]], p[f[:, 2]]


def bounding_box(mesh: TriangleMesh) -> AABB:
    """Componentwise min/max over all vertices referenced by faces."""
    used = mesh.positions[np.unique(mesh.faces)]
    return AABB(used.min(axis=0), used.max(axis=0))


def face_areas(mesh: TriangleMesh) -> np.ndarray:
    """Per-face triangle area, |cross(e1, e2)| / 2; degenerate faces give 0."""
    a, b, c = mesh.corners()
    return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)


def face_normals(mesh: TriangleMesh, normalized: bool = True) -> np.ndarray:
    """Per-face normals.

    With ``normalized=False`` the raw cross product is returned, whose
    magnitude is twice the face area (useful as an area weight).
    Degenerate faces yield the zero vector in either mode.
    """
    a, b, c = mesh.corners()
    n = np.cross(b - a, c - a)
    if normalized:
        lengths = np.linalg.norm(n, axis=1)
        nz = lengths > 0
        n[nz] /= lengths[nz, None]
    return n


def face_centroids(mesh: TriangleMesh) -> np.ndarray:
    """(F, 3) face centroid positions."""
    a, b, c = mesh.corners()
    return (a + b + c) / 3.0


def compute_vertex_normals(mesh: TriangleMesh) -> TriangleMesh:
    """Return a copy of ``mesh`` with area-weighted per-vertex normals.

    Each vertex normal is the normalized sum of incident face normals
    weighted by face area; zero-area faces contribute nothing. Vertices
    with no incident (non-degenerate) face get the ``(0, 0, 1)`` sentinel.
    """
    weighted = face_normals(mesh, normalized=False)  # magnitude = 2 * area
    v = mesh.vertex_count
    acc = np.zeros((v, 3))
    idx = mesh.faces.ravel()
    for k in range(3):
        w = np.repeat(weighted[:, k], 3)
        acc[:, k] = np.bincount(idx, weights=w, minlength=v)
    lengths = np.linalg.norm(acc, axis=1)
    ok = lengths > 0
    acc[ok] /= lengths[ok, None]
    acc[~ok] = (0.0, 0.0, 1.0)
    return replace(mesh, normals=acc, _cache={})


def edges(mesh: TriangleMesh) -> np.ndarray:
    """(E, 2) undirected unique edges, each sorted low-to-high."""
    f = mesh.faces
    e = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
    e.sort(axis=1)
    return np.unique(e, axis=0)


def vertex_adjacency(mesh: TriangleMesh) -> dict[int, set[int]]:
    """Symmetric vertex neighbor relation induced by shared edges.

    Vertices not referenced by any face are absent from the map.
    """
    adj: dict[int, set[int]] = {}
    for a, b in edges(mesh):
        a, b = int(a), int(b)
        if a == b:
            continue
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    for vid in np.unique(mesh.faces):
        adj.setdefault(int(vid), set())
    return adj


def adjacency_csr(mesh: TriangleMesh) -> tuple[np.ndarray, np.ndarray]:
    """Vertex adjacency in CSR form: (offsets, neighbor indices).

    ``offsets`` has length V+1; neighbors of vertex i occupy
    ``neighbors[offsets[i]:offsets[i + 1]]``. Cached on the mesh.
    """
    cached = mesh._cache.get("adjacency_csr")
    if cached is not None:
        return cached
    e = edges(mesh)
    e = e[e[:, 0] != e[:, 1]]
    both = np.concatenate([e, e[:, ::-1]])
    order = np.lexsort((both[:, 1], both[:, 0]))
    both = both[order]
    v = mesh.vertex_count
    counts = np.bincount(both[:, 0], minlength=v)
    offsets = np.zeros(v + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    result = (offsets, np.ascontiguousarray(both[:, 1]))
    mesh._cache["adjacency_csr"] = result
    return result


def total_surface_area(mesh: TriangleMesh) -> float:
    return float(face_areas(mesh).sum())


def derive_vertices(mesh: TriangleMesh, face_ids) -> set[int]:
    """Union of the vertex triples of the given faces."""
    ids = np.fromiter(face_ids, dtype=np.int64) if not isinstance(face_ids, np.ndarray) else face_ids
    if ids.size == 0:
        return set()
    if ids.min() < 0 or ids.max() >= mesh.face_count:
        raise FaceIndexError("face id out of range")
    return {int(v) for v in np.unique(mesh.faces[ids])}
