"""Camera model tests: pick rays, projection, and their round trip."""

import numpy as np
import pytest

from meshmark import CameraPose, ScreenPoint, pick_ray, project_point
from meshmark.camera import project_points

from conftest import random_camera
from oracles import project_ndc


@pytest.fixture
def cam():
    return CameraPose(eye=[1.0, 2.0, 3.0], look_dir=[0.0, 0.0, -1.0],
                      up=[0.0, 1.0, 0.0], vfov=1.0, aspect=1.5,
                      near=0.1, far=50.0)


class TestCameraPose:
    def test_reject_bad_vfov(self):
        for vfov in (0.0, -1.0, np.pi):
            with pytest.raises(ValueError, match="vfov"):
                CameraPose(eye=[0, 0, 0], look_dir=[0, 0, -1], up=[0, 1, 0],
                           vfov=vfov, aspect=1.0, near=0.1, far=10.0)

    def test_reject_bad_aspect(self):
        with pytest.raises(ValueError, match="aspect"):
            CameraPose(eye=[0, 0, 0], look_dir=[0, 0, -1], up=[0, 1, 0],
                       vfov=1.0, aspect=0.0, near=0.1, far=10.0)

    def test_reject_bad_planes(self):
        for near, far in ((0.0, 10.0), (-1.0, 10.0), (5.0, 5.0), (10.0, 1.0)):
            with pytest.raises(ValueError, match="near"):
                CameraPose(eye=[0, 0, 0], look_dir=[0, 0, -1], up=[0, 1, 0],
                           vfov=1.0, aspect=1.0, near=near, far=far)

    def test_reject_parallel_up(self):
        with pytest.raises(ValueError, match="parallel"):
            CameraPose(eye=[0, 0, 0], look_dir=[0, 0, -1], up=[0, 0, 1],
                       vfov=1.0, aspect=1.0, near=0.1, far=10.0)

    def test_reject_zero_look(self):
        with pytest.raises(ValueError, match="look_dir"):
            CameraPose(eye=[0, 0, 0], look_dir=[0, 0, 0], up=[0, 1, 0],
                       vfov=1.0, aspect=1.0, near=0.1, far=10.0)

    def test_basis_orthonormalized(self):
        # skewed inputs come out as an exact right-handed orthonormal basis
        c = CameraPose(eye=[0, 0, 0], look_dir=[1.0, 0.2, -3.0], up=[0.3, 1.0, 0.4],
                       vfov=1.0, aspect=1.0, near=0.1, far=10.0)
        for v in (c.look_dir, c.up, c.right):
            assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
        assert c.right @ c.up == pytest.approx(0.0, abs=1e-12)
        assert c.right @ c.look_dir == pytest.approx(0.0, abs=1e-12)
        assert c.up @ c.look_dir == pytest.approx(0.0, abs=1e-12)
        np.testing.assert_allclose(np.cross(c.right, c.up), -c.look_dir, atol=1e-12)

    def test_dict_round_trip(self, cam):
        again = CameraPose.from_dict(cam.to_dict())
        np.testing.assert_array_equal(again.eye, cam.eye)
        np.testing.assert_array_equal(again.look_dir, cam.look_dir)
        np.testing.assert_array_equal(again.up, cam.up)
        assert (again.vfov, again.aspect, again.near, again.far) == (
            cam.vfov, cam.aspect, cam.near, cam.far
        )

    def test_from_dict_missing_key(self, cam):
        d = cam.to_dict()
        del d["vfov"]
        with pytest.raises(ValueError, match="vfov"):
            CameraPose.from_dict(d)


class TestScreenPoint:
    def test_bounds(self):
        ScreenPoint(1.0, -1.0)
        with pytest.raises(ValueError):
            ScreenPoint(1.0001, 0.0)
        with pytest.raises(ValueError):
            ScreenPoint(0.0, -1.0001)


class TestPickRay:
    def test_center_is_look_dir(self, cam):
        ray = pick_ray(cam, ScreenPoint(0.0, 0.0))
        np.testing.assert_allclose(ray.direction, cam.look_dir, atol=1e-15)
        np.testing.assert_array_equal(ray.origin, cam.eye)

    def test_corners_symmetric(self, cam):
        r1 = pick_ray(cam, ScreenPoint(1.0, 1.0)).direction
        r2 = pick_ray(cam, ScreenPoint(-1.0, -1.0)).direction
        # mirrored NDC points straddle the look axis symmetrically
        np.testing.assert_allclose(r1 + r2, 2.0 * (r1 @ cam.look_dir) * cam.look_dir,
                                   atol=1e-12)

    def test_x_spans_wider_when_aspect_large(self, cam):
        rx = pick_ray(cam, ScreenPoint(1.0, 0.0)).direction
        ry = pick_ray(cam, ScreenPoint(0.0, 1.0)).direction
        # aspect 1.5 opens the horizontal half-angle wider than vertical
        assert abs(rx @ cam.right) > abs(ry @ cam.up)


class TestProjectPoint:
    def test_eye_axis_projects_to_center(self, cam):
        q = cam.eye + 3.0 * cam.look_dir
        x, y, depth = project_point(cam, q)
        assert (x, y) == (pytest.approx(0.0, abs=1e-12), pytest.approx(0.0, abs=1e-12))
        assert depth == pytest.approx(3.0, abs=1e-12)

    def test_behind_near_plane(self, cam):
        assert project_point(cam, cam.eye) is None
        assert project_point(cam, cam.eye - cam.look_dir) is None
        just_inside = cam.eye + 0.99 * cam.near * cam.look_dir
        assert project_point(cam, just_inside) is None

    def test_depth_is_euclidean(self, cam):
        q = cam.eye + 2.0 * cam.look_dir + 1.0 * cam.right
        *_, depth = project_point(cam, q)
        assert depth == pytest.approx(np.sqrt(5.0), abs=1e-12)

    def test_round_trip_with_pick_ray(self):
        # project, pick the ray through the result, march depth: the
        # original point must come back
        rng = np.random.default_rng(31)
        done = 0
        while done < 300:
            cam = random_camera(rng)
            q = rng.uniform(-0.5, 1.5, size=3)
            res = project_point(cam, q)
            if res is None:
                continue
            x, y, depth = res
            if abs(x) > 1.0 or abs(y) > 1.0:
                continue
            ray = pick_ray(cam, ScreenPoint(x, y))
            np.testing.assert_allclose(ray.origin + depth * ray.direction, q,
                                       atol=1e-9)
            done += 1

    def test_matches_matrix_oracle(self):
        rng = np.random.default_rng(37)
        for _ in range(50):
            cam = random_camera(rng)
            pts = rng.uniform(-1.0, 2.0, size=(40, 3))
            ox, oy, ovalid = project_ndc(cam, pts)
            for i, q in enumerate(pts):
                res = project_point(cam, q)
                if res is None:
                    assert not ovalid[i]
                    continue
                assert ovalid[i]
                np.testing.assert_allclose(res[:2], (ox[i], oy[i]),
                                           rtol=1e-9, atol=1e-9)


class TestProjectPoints:
    def test_matches_scalar(self, cam):
        rng = np.random.default_rng(41)
        pts = rng.uniform(-3.0, 3.0, size=(200, 3)) + cam.eye
        x, y, depth, valid = project_points(cam, pts)
        for i, q in enumerate(pts):
            res = project_point(cam, q)
            if res is None:
                # scalar rejects z < near, vectorized keeps z == near;
                # random points never land exactly on the boundary
                assert not valid[i]
                assert np.isnan(x[i]) and np.isnan(y[i]) and np.isnan(depth[i])
            else:
                assert valid[i]
                np.testing.assert_allclose((x[i], y[i], depth[i]), res, rtol=1e-12)
