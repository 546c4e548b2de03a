"""Core mesh container and derived-quantity tests."""

import numpy as np
import pytest

from meshmark import (
    EmptyMeshError,
    FaceIndexError,
    TriangleMesh,
    bounding_box,
    compute_vertex_normals,
    derive_vertices,
    face_areas,
    face_centroids,
    face_normals,
    total_surface_area,
)
from meshmark.mesh import adjacency_csr, edges, vertex_adjacency
from meshmark import procgen

TRI = TriangleMesh(
    positions=np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
    faces=np.array([[0, 1, 2]]),
)


class TestValidation:
    def test_positions_shape(self):
        with pytest.raises(ValueError, match="positions"):
            TriangleMesh(positions=np.zeros((3, 2)), faces=np.array([[0, 1, 2]]))

    def test_faces_shape(self):
        with pytest.raises(ValueError, match="faces"):
            TriangleMesh(positions=np.zeros((3, 3)), faces=np.array([[0, 1]]))

    def test_no_faces(self):
        with pytest.raises(EmptyMeshError):
            TriangleMesh(positions=np.zeros((3, 3)), faces=np.zeros((0, 3), dtype=np.int64))

    def test_face_index_out_of_range(self):
        with pytest.raises(FaceIndexError):
            TriangleMesh(positions=np.zeros((3, 3)), faces=np.array([[0, 1, 3]]))
        with pytest.raises(FaceIndexError):
            TriangleMesh(positions=np.zeros((3, 3)), faces=np.array([[0, -1, 2]]))

    def test_non_unit_normals_rejected(self):
        with pytest.raises(ValueError, match="unit"):
            TriangleMesh(
                positions=TRI.positions,
                faces=TRI.faces,
                normals=np.full((3, 3), 0.5),
            )

    def test_uv_shape_rejected(self):
        with pytest.raises(ValueError, match="uvs"):
            TriangleMesh(positions=TRI.positions, faces=TRI.faces, uvs=np.zeros((2, 2)))

    def test_dtype_coercion(self):
        m = TriangleMesh(
            positions=np.zeros((3, 3), dtype=np.float32),
            faces=np.array([[0, 1, 2]], dtype=np.int32),
        )
        assert m.positions.dtype == np.float64
        assert m.faces.dtype == np.int64
        assert m.positions.flags.c_contiguous

    def test_counts(self, cube):
        assert cube.vertex_count == 8
        assert cube.face_count == 12

    def test_corners_shapes(self, cube):
        a, b, c = cube.corners()
        assert a.shape == b.shape == c.shape == (12, 3)
        np.testing.assert_array_equal(a, cube.positions[cube.faces[:, 0]])


class TestAreasAndNormals:
    def test_single_triangle_area(self):
        np.testing.assert_allclose(face_areas(TRI), [0.5])

    def test_cube_face_areas(self, cube):
        np.testing.assert_allclose(face_areas(cube), np.full(12, 0.5))
        assert total_surface_area(cube) == pytest.approx(6.0, abs=1e-12)

    def test_icosphere_area_approaches_sphere(self):
        # chordal faces underestimate the smooth surface; refinement
        # must close the gap monotonically
        target = 4.0 * np.pi
        a2 = total_surface_area(procgen.icosphere(2))
        a3 = total_surface_area(procgen.icosphere(3))
        assert 0.97 * target < a2 < target
        assert a2 < a3 < target

    def test_face_normals_unit(self, sphere):
        n = face_normals(sphere)
        np.testing.assert_allclose(np.linalg.norm(n, axis=1), 1.0, atol=1e-12)

    def test_face_normals_unnormalized_magnitude(self, cube):
        raw = face_normals(cube, normalized=False)
        np.testing.assert_allclose(np.linalg.norm(raw, axis=1), 2.0 * face_areas(cube))

    def test_sphere_normals_point_outward(self, sphere):
        n = face_normals(sphere)
        c = face_centroids(sphere)
        assert np.all(np.einsum("ij,ij->i", n, c) > 0)

    def test_degenerate_face_yields_zero_normal(self):
        m = TriangleMesh(
            positions=np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]),
            faces=np.array([[0, 1, 2]]),
        )
        np.testing.assert_array_equal(face_normals(m), [[0.0, 0.0, 0.0]])
        assert face_areas(m)[0] == 0.0
        # vertex normals still come out unit length via the fallback
        np.testing.assert_allclose(
            np.linalg.norm(compute_vertex_normals(m).normals, axis=1), 1.0
        )

    def test_vertex_normals_on_plane(self):
        m = procgen.plane_grid(6, 6)
        out = compute_vertex_normals(m)
        assert out is not m and m.normals is None
        np.testing.assert_allclose(out.normals, np.tile([0.0, 0.0, 1.0], (m.vertex_count, 1)), atol=1e-12)

    def test_vertex_normals_on_sphere(self, sphere):
        n = compute_vertex_normals(sphere).normals
        # vertex normals of a centered sphere align with the radial
        # direction (valence-5 vertices deviate the most)
        radial = sphere.positions / np.linalg.norm(sphere.positions, axis=1, keepdims=True)
        assert np.einsum("ij,ij->i", n, radial).min() > 0.999

    def test_centroids(self, cube):
        np.testing.assert_allclose(
            face_centroids(cube), cube.positions[cube.faces].mean(axis=1)
        )


class TestTopology:
    def test_cube_edge_count(self, cube):
        # Euler: E = V + F - 2 for a closed genus-0 surface
        e = edges(cube)
        assert e.shape == (18, 2)
        assert np.all(e[:, 0] < e[:, 1])
        # unique and lexicographically sorted
        assert np.array_equal(e, np.unique(e, axis=0))

    def test_adjacency_symmetric(self, sphere):
        adj = vertex_adjacency(sphere)
        assert set(adj) == set(range(sphere.vertex_count))
        for v, ns in adj.items():
            for n in ns:
                assert v in adj[n]

    def test_adjacency_csr_matches_dict(self, cube):
        offsets, neighbors = adjacency_csr(cube)
        adj = vertex_adjacency(cube)
        assert offsets.shape == (cube.vertex_count + 1,)
        for v in range(cube.vertex_count):
            got = set(neighbors[offsets[v]:offsets[v + 1]].tolist())
            assert got == adj[v]

    def test_adjacency_csr_cached(self, cube):
        assert adjacency_csr(cube) is adjacency_csr(cube)

    def test_icosphere_regular_valence(self):
        # subdivided icosahedron: 12 original vertices keep valence 5,
        # all inserted ones have valence 6
        adj = vertex_adjacency(procgen.icosphere(2))
        valences = sorted(len(v) for v in adj.values())
        assert valences.count(5) == 12
        assert set(valences) == {5, 6}


class TestDeriveVertices:
    def test_single_face(self, cube):
        assert derive_vertices(cube, [0]) == set(cube.faces[0].tolist())

    def test_all_faces(self, cube):
        assert derive_vertices(cube, range(12)) == set(range(8))

    def test_empty(self, cube):
        assert derive_vertices(cube, []) == set()

    def test_out_of_range(self, cube):
        with pytest.raises(FaceIndexError):
            derive_vertices(cube, [12])
        with pytest.raises(FaceIndexError):
            derive_vertices(cube, [-1])


class TestBoundingBox:
    def test_cube(self, cube):
        box = bounding_box(cube)
        np.testing.assert_array_equal(box.lo, [0.0, 0.0, 0.0])
        np.testing.assert_array_equal(box.hi, [1.0, 1.0, 1.0])
        assert box.diagonal == pytest.approx(np.sqrt(3.0))

    def test_unreferenced_vertices_ignored(self):
        m = TriangleMesh(
            positions=np.array(
                [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [99.0, 99.0, 99.0]]
            ),
            faces=np.array([[0, 1, 2]]),
        )
        np.testing.assert_array_equal(bounding_box(m).hi, [1.0, 1.0, 0.0])

    def test_to_dict(self, cube):
        d = bounding_box(cube).to_dict()
        assert d == {"min": [0.0, 0.0, 0.0], "max": [1.0, 1.0, 1.0]}
