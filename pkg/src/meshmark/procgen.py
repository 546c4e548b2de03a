"""Procedural mesh generators used by tests, demos, and benchmarks."""

from __future__ import annotations

import numpy as np

from .mesh import TriangleMesh


def single_triangle() -> TriangleMesh:
    """One right triangle in the z=0 plane."""
    positions = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    faces = np.array([[0, 1, 2]], dtype=np.int64)
    return TriangleMesh(positions=positions, faces=faces, name="triangle")


def unit_cube() -> TriangleMesh:
    """Axis-aligned cube spanning [0,1]^3, 8 vertices, 12 triangles.

    Faces wind counter-clockwise seen from outside.
    """
    positions = np.array(
        [
            [0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
            [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1],
        ],
        dtype=np.float64,
    )
    faces = np.array(
        [
            [0, 2, 1], [0, 3, 2],  # bottom (z=0), outward -z
            [4, 5, 6], [4, 6, 7],  # top (z=1), outward +z
            [0, 1, 5], [0, 5, 4],  # front (y=0), outward -y
            [2, 3, 7], [2, 7, 6],  # back (y=1), outward +y
            [0, 4, 7], [0, 7, 3],  # left (x=0), outward -x
            [1, 2, 6], [1, 6, 5],  # right (x=1), outward +x
        ],
        dtype=np.int64,
    )
    return TriangleMesh(positions=positions, faces=faces, name="cube")


def icosphere(subdivisions: int = 2, radius: float = 1.0) -> TriangleMesh:
    """Icosahedron subdivided ``subdivisions`` times, vertices on a sphere.

    Each subdivision splits every triangle into four; all vertices are
    projected back onto the sphere of the given radius about the origin.
    """
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
            [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
            [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
        ],
        dtype=np.float64,
    )
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ],
        dtype=np.int64,
    )

    verts_list = [tuple(v) for v in verts]
    for _ in range(subdivisions):
        midpoint_cache: dict = {}
        new_faces = []

        def midpoint(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            idx = midpoint_cache.get(key)
            if idx is None:
                m = np.array(verts_list[a]) + np.array(verts_list[b])
                m /= np.linalg.norm(m)
                idx = len(verts_list)
                verts_list.append(tuple(m))
                midpoint_cache[key] = idx
            return idx

        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
        faces = np.array(new_faces, dtype=np.int64)

    positions = np.array(verts_list, dtype=np.float64) * radius
    return TriangleMesh(positions=positions, faces=faces, name=f"icosphere{subdivisions}")


def plane_grid(nx: int = 10, ny: int = 10, width: float = 1.0, height: float = 1.0,
               z: float = 0.0) -> TriangleMesh:
    """Regular triangulated grid in the z=const plane, (nx+1)*(ny+1) vertices."""
    xs = np.linspace(0.0, width, nx + 1)
    ys = np.linspace(0.0, height, ny + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    positions = np.column_stack([gx.ravel(), gy.ravel(), np.full(gx.size, z)])

    i, j = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    v00 = (i * (ny + 1) + j).ravel()
    v10 = ((i + 1) * (ny + 1) + j).ravel()
    v01 = (i * (ny + 1) + j + 1).ravel()
    v11 = ((i + 1) * (ny + 1) + j + 1).ravel()
    faces = np.concatenate(
        [np.column_stack([v00, v10, v11]), np.column_stack([v00, v11, v01])]
    ).astype(np.int64)
    return TriangleMesh(positions=positions, faces=faces, name="grid")


def two_parallel_planes(gap: float = 1.0, nx: int = 8, ny: int = 8) -> tuple[TriangleMesh, np.ndarray, np.ndarray]:
    """Two identical grids separated along +z.

    Returns the combined mesh plus the face id arrays of the near (z=0)
    and far (z=-gap) planes. A camera looking down -z from z>0 sees the
    near plane fully occluding the far one.
    """
    near = plane_grid(nx=nx, ny=ny, z=0.0)
    far = plane_grid(nx=nx, ny=ny, z=-gap)
    positions = np.concatenate([near.positions, far.positions])
    faces = np.concatenate([near.faces, far.faces + near.vertex_count]).astype(np.int64)
    mesh = TriangleMesh(positions=positions, faces=faces, name="planes")
    near_ids = np.arange(near.face_count, dtype=np.int64)
    far_ids = np.arange(near.face_count, mesh.face_count, dtype=np.int64)
    return mesh, near_ids, far_ids


def cylinder_tube(radius: float = 0.5, length: float = 2.0, segments: int = 64,
                  rings: int = 32) -> TriangleMesh:
    """Open cylinder along +z with no caps (every vertex is interior in
    the circular direction; only the two end rings are boundary)."""
    thetas = np.linspace(0.0, 2.0 * np.pi, segments, endpoint=False)
    zs = np.linspace(0.0, length, rings + 1)
    tt, zz = np.meshgrid(thetas, zs, indexing="ij")
    positions = np.column_stack(
        [radius * np.cos(tt).ravel(), radius * np.sin(tt).ravel(), zz.ravel()]
    )

    faces = []
    for s in range(segments):
        s1 = (s + 1) % segments
        for r in range(rings):
            a = s * (rings + 1) + r
            b = s1 * (rings + 1) + r
            faces.append((a, b, b + 1))
            faces.append((a, b + 1, a + 1))
    return TriangleMesh(
        positions=positions, faces=np.array(faces, dtype=np.int64), name="cylinder"
    )


def random_soup(n_faces: int = 10_000, seed: int = 0, extent: float = 10.0,
                tri_scale: float = 0.3) -> TriangleMesh:
    """Disconnected random triangles filling a cube, for ray-cast stress tests.

    Each triangle gets an independent random centroid in
    ``[-extent/2, extent/2]^3`` and corners jittered around it.
    """
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-extent / 2.0, extent / 2.0, size=(n_faces, 1, 3))
    corners = centers + rng.normal(scale=tri_scale, size=(n_faces, 3, 3))
    positions = corners.reshape(-1, 3)
    faces = np.arange(n_faces * 3, dtype=np.int64).reshape(-1, 3)
    return TriangleMesh(positions=positions, faces=faces, name="soup")


def bumpy_sphere(subdivisions: int = 3, radius: float = 1.0, bump_amp: float = 0.08,
                 bump_freq: float = 6.0) -> TriangleMesh:
    """Sphere with a smooth radial displacement, giving non-uniform
    curvature for detector demos."""
    base = icosphere(subdivisions=subdivisions, radius=1.0)
    p = base.positions
    r = radius * (
        1.0
        + bump_amp * np.sin(bump_freq * p[:, 0]) * np.sin(bump_freq * p[:, 1])
        * np.sin(bump_freq * p[:, 2])
    )
    return TriangleMesh(positions=p * r[:, None], faces=base.faces, name="bumpy")


def carved_relief(n: int = 708, amplitude: float = 0.035, frequency: float = 420.0,
                  width: float = 1.0) -> TriangleMesh:
    """Dense sinusoidal relief: a square grid displaced along z.

    ``n=708`` gives 2*708^2 = 1,002,528 triangles, a stand-in for a
    digitized carved surface. Amplitude and frequency are chosen so the
    slope a*k stays around 15, a plausibly steep relief.
    """
    xs = np.linspace(0.0, width, n + 1)
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    z = amplitude * np.sin(frequency * gx) * np.sin(frequency * gy)
    positions = np.column_stack([gx.ravel(), gy.ravel(), z.ravel()])

    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    v00 = (i * (n + 1) + j).ravel()
    v10 = ((i + 1) * (n + 1) + j).ravel()
    v01 = (i * (n + 1) + j + 1).ravel()
    v11 = ((i + 1) * (n + 1) + j + 1).ravel()
    faces = np.concatenate(
        [np.column_stack([v00, v10, v11]), np.column_stack([v00, v11, v01])]
    ).astype(np.int64)
    return TriangleMesh(positions=positions, faces=faces, name="relief")
