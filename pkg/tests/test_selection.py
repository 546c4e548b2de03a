"""Brush and lasso selection tests, including oracle equivalence."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meshmark import (
    BrushStroke,
    CameraPose,
    InvalidPolygonError,
    InvalidStrokeError,
    LassoPolygon,
    MeshMismatchError,
    ScreenPoint,
    SelectionSet,
    brush_select,
    build_bvh,
    face_visible,
    lasso_select,
    pick_ray,
    procgen,
    raycast_nearest,
    selection_difference,
    selection_intersect,
    selection_union,
)
from meshmark.selection import densify_stroke, point_in_polygon, visible_mask

from conftest import random_camera
from oracles import brush_oracle, lasso_oracle, point_in_polygon_slow

FULL_VIEW = LassoPolygon(vertices=[(-1, -1), (1, -1), (1, 1), (-1, 1)])


def random_lasso(rng):
    k = int(rng.integers(3, 9))
    return [(float(x), float(y)) for x, y in rng.uniform(-0.9, 0.9, size=(k, 2))]


def random_stroke(rng):
    k = int(rng.integers(1, 5))
    pts = [(float(x), float(y)) for x, y in rng.uniform(-0.8, 0.8, size=(k, 2))]
    return pts, float(rng.uniform(0.05, 0.4))


class TestDensify:
    def test_originals_kept_bit_exact(self):
        pts = np.array([[0.0, 0.0], [0.7071, 0.1], [-0.3, 0.9]])
        out = densify_stroke(pts, 0.05)
        idx = [np.nonzero((out == p).all(axis=1))[0] for p in pts]
        assert all(len(i) == 1 for i in idx)
        assert idx[0][0] < idx[1][0] < idx[2][0]

    def test_spacing_bound(self):
        pts = np.array([[-1.0, -1.0], [1.0, 1.0], [1.0, -1.0]])
        out = densify_stroke(pts, 0.1)
        gaps = np.linalg.norm(np.diff(out, axis=0), axis=1)
        assert gaps.max() <= 0.1 + 1e-12

    def test_single_point(self):
        out = densify_stroke(np.array([[0.2, 0.3]]), 0.1)
        np.testing.assert_array_equal(out, [[0.2, 0.3]])

    def test_duplicate_points(self):
        out = densify_stroke(np.array([[0.1, 0.1], [0.1, 0.1]]), 0.1)
        assert out.shape == (2, 2)


class TestGestureValidation:
    def test_stroke_needs_samples(self):
        with pytest.raises(InvalidStrokeError):
            BrushStroke(samples=[], radius=0.1)

    def test_stroke_radius_positive(self):
        for r in (0.0, -0.5, float("nan"), float("inf")):
            with pytest.raises(InvalidStrokeError):
                BrushStroke(samples=[(0, 0)], radius=r)

    def test_stroke_rejects_outside_ndc(self):
        with pytest.raises(InvalidStrokeError):
            BrushStroke(samples=[(1.5, 0.0)], radius=0.1)

    def test_stroke_rejects_garbage(self):
        with pytest.raises(InvalidStrokeError):
            BrushStroke(samples=["xy"], radius=0.1)

    def test_stroke_accepts_screen_points(self):
        s = BrushStroke(samples=[ScreenPoint(0.1, 0.2)], radius=0.1)
        assert s.samples == ((0.1, 0.2),)

    def test_lasso_needs_three(self):
        with pytest.raises(InvalidPolygonError):
            LassoPolygon(vertices=[(0, 0), (1, 1)])

    def test_lasso_rejects_non_finite(self):
        with pytest.raises(InvalidPolygonError):
            LassoPolygon(vertices=[(0, 0), (1, 1), (float("nan"), 0)])


class TestSelectionSet:
    def test_coercion_and_len(self):
        s = SelectionSet("m", frozenset({np.int64(3), 1}))
        assert s.sorted_faces() == [1, 3]
        assert len(s) == 2
        assert all(type(f) is int for f in s.faces)

    def test_set_ops(self):
        a = SelectionSet("m", frozenset({1, 2, 3}))
        b = SelectionSet("m", frozenset({3, 4}))
        assert selection_union(a, b).sorted_faces() == [1, 2, 3, 4]
        assert selection_intersect(a, b).sorted_faces() == [3]
        assert selection_difference(a, b).sorted_faces() == [1, 2]

    def test_mismatched_mesh_ids(self):
        a = SelectionSet("m1", frozenset({1}))
        b = SelectionSet("m2", frozenset({1}))
        for op in (selection_union, selection_intersect, selection_difference):
            with pytest.raises(MeshMismatchError):
                op(a, b)


class TestPointInPolygon:
    SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])

    def check(self, px, py, poly, expect):
        got = point_in_polygon(np.array([px]), np.array([py]), np.asarray(poly))
        assert bool(got[0]) is expect

    def test_square(self):
        self.check(0.5, 0.5, self.SQUARE, True)
        self.check(1.5, 0.5, self.SQUARE, False)
        self.check(-0.1, 0.5, self.SQUARE, False)

    def test_concave(self):
        # C-shape: the notch at mid-right is outside
        poly = [(0, 0), (3, 0), (3, 1), (1, 1), (1, 2), (3, 2), (3, 3), (0, 3)]
        self.check(2.0, 1.5, poly, False)
        self.check(0.5, 1.5, poly, True)
        self.check(2.0, 0.5, poly, True)

    def test_pentagram_even_odd(self):
        # self-intersecting star: the central pentagon has crossing
        # number 2, so the even-odd rule calls it outside
        ang = np.pi / 2 + np.arange(5) * (4 * np.pi / 5)
        star = np.column_stack([np.cos(ang), np.sin(ang)])
        self.check(0.0, 0.0, star, False)
        # points inside a spike are inside
        tip_dir = np.array([np.cos(ang[0]), np.sin(ang[0])])
        p = 0.8 * tip_dir
        self.check(p[0], p[1], star, True)

    def test_matches_slow_oracle_on_grid(self):
        rng = np.random.default_rng(47)
        for _ in range(20):
            poly = rng.uniform(-1, 1, size=(int(rng.integers(3, 9)), 2))
            px, py = rng.uniform(-1.2, 1.2, size=(80, 2)).T
            fast = point_in_polygon(px, py, poly)
            slow = [point_in_polygon_slow(x, y, poly.tolist()) for x, y in zip(px, py)]
            np.testing.assert_array_equal(fast, slow)


class TestVisibility:
    def test_front_face_visible_back_hidden(self, cube, cube_bvh, front_camera):
        z_of = cube.positions[cube.faces].mean(axis=1)[:, 2]
        front = int(np.argmax(z_of))
        back = int(np.argmin(z_of))
        assert face_visible(cube, cube_bvh, front_camera, front)
        assert not face_visible(cube, cube_bvh, front_camera, back)

    def test_empty_input(self, cube, cube_bvh, front_camera):
        out = visible_mask(cube, cube_bvh, front_camera, np.array([], dtype=np.int64))
        assert out.shape == (0,)

    def test_coincident_faces_both_visible(self, front_camera):
        # duplicated geometry: the loser of the raycast tie still counts
        # as visible through the relative-t tolerance
        base = procgen.plane_grid(2, 2, z=0.5)
        pos = np.concatenate([base.positions, base.positions])
        faces = np.concatenate([base.faces, base.faces + base.vertex_count])
        mesh = procgen.TriangleMesh(positions=pos, faces=faces)
        bvh = build_bvh(mesh)
        vis = visible_mask(mesh, bvh, front_camera, np.arange(mesh.face_count))
        assert vis.all()


class TestLasso:
    def test_full_view_straight_on(self, cube, cube_bvh, front_camera):
        got = lasso_select(cube, cube_bvh, front_camera, FULL_VIEW)
        # straight-on view: only the two z=1 faces survive occlusion
        want = {
            i for i in range(cube.face_count)
            if np.all(cube.positions[cube.faces[i]][:, 2] == 1.0)
        }
        assert got.faces == want

    def test_empty_when_nothing_inside(self, cube, cube_bvh, front_camera):
        tiny = LassoPolygon(vertices=[(0.9, 0.9), (0.95, 0.9), (0.95, 0.95)])
        assert len(lasso_select(cube, cube_bvh, front_camera, tiny)) == 0

    def test_mesh_id_defaults_to_name(self, cube, cube_bvh, front_camera):
        assert lasso_select(cube, cube_bvh, front_camera, FULL_VIEW).mesh_id == cube.name
        assert lasso_select(
            cube, cube_bvh, front_camera, FULL_VIEW, mesh_id="abc"
        ).mesh_id == "abc"

    @pytest.mark.parametrize("mesh_name", ["cube", "sphere"])
    def test_matches_oracle(self, mesh_name, request):
        mesh = request.getfixturevalue(mesh_name)
        bvh = request.getfixturevalue(f"{mesh_name}_bvh")
        target = (0.5, 0.5, 0.5) if mesh_name == "cube" else (0.0, 0.0, 0.0)
        rng = np.random.default_rng(53)
        for _ in range(15):
            cam = random_camera(rng, target=target)
            poly = random_lasso(rng)
            got = lasso_select(mesh, bvh, cam, LassoPolygon(vertices=poly))
            assert got.faces == lasso_oracle(mesh, cam, poly)


class TestBrush:
    def test_anchor_under_tiny_radius(self, cube, cube_bvh, front_camera):
        # radius too small to catch any centroid: the pick-ray anchor
        # still selects the face under the cursor
        sample = (0.31, 0.27)
        stroke = BrushStroke(samples=[sample], radius=1e-4)
        got = brush_select(cube, cube_bvh, front_camera, stroke)
        hit = raycast_nearest(cube_bvh, cube,
                              pick_ray(front_camera, ScreenPoint(*sample)))
        assert got.faces == {hit.face_id}

    def test_off_mesh_selects_nothing(self, cube, cube_bvh, front_camera):
        stroke = BrushStroke(samples=[(0.95, 0.95)], radius=0.01)
        assert len(brush_select(cube, cube_bvh, front_camera, stroke)) == 0

    @pytest.mark.parametrize("mesh_name", ["cube", "sphere"])
    def test_matches_oracle(self, mesh_name, request):
        mesh = request.getfixturevalue(mesh_name)
        bvh = request.getfixturevalue(f"{mesh_name}_bvh")
        target = (0.5, 0.5, 0.5) if mesh_name == "cube" else (0.0, 0.0, 0.0)
        rng = np.random.default_rng(59)
        for _ in range(15):
            cam = random_camera(rng, target=target)
            pts, radius = random_stroke(rng)
            got = brush_select(mesh, bvh, cam,
                               BrushStroke(samples=pts, radius=radius))
            assert got.faces == brush_oracle(mesh, cam, pts, radius)

    @settings(max_examples=60, deadline=None)
    @given(
        seed=st.integers(0, 2**32 - 1),
        radius=st.floats(0.02, 0.45),
        n_samples=st.integers(1, 4),
    )
    def test_monotone_in_radius(self, seed, radius, n_samples):
        mesh = procgen.unit_cube()
        bvh = build_bvh(mesh)
        rng = np.random.default_rng(seed)
        cam = random_camera(rng)
        pts = [(float(x), float(y)) for x, y in rng.uniform(-0.55, 0.55, (n_samples, 2))]
        small = brush_select(mesh, bvh, cam, BrushStroke(samples=pts, radius=radius))
        big = brush_select(mesh, bvh, cam, BrushStroke(samples=pts, radius=2 * radius))
        assert small.faces <= big.faces


class TestOcclusion:
    def test_far_plane_never_selected(self):
        mesh, near_ids, far_ids = procgen.two_parallel_planes()
        bvh = build_bvh(mesh)
        cam = CameraPose(eye=[0.5, 0.5, 3.0], look_dir=[0.0, 0.0, -1.0],
                         up=[0.0, 1.0, 0.0], vfov=0.9, aspect=1.0,
                         near=0.01, far=100.0)
        far = set(far_ids.tolist())
        lassoed = lasso_select(mesh, bvh, cam, FULL_VIEW)
        assert lassoed.faces.isdisjoint(far)
        assert lassoed.faces == set(near_ids.tolist())
        brushed = brush_select(
            mesh, bvh, cam, BrushStroke(samples=[(0.0, 0.0), (0.4, 0.4)], radius=0.5)
        )
        assert brushed.faces and brushed.faces.isdisjoint(far)
