import numpy as np
import pytest

from meshmark import CameraPose, Ray, build_bvh, raycast_nearest, saliency_map
from meshmark import procgen


@pytest.fixture(scope="session", autouse=True)
def _jit_warmup():
    """Compile (or load from disk cache) every jitted kernel up front so
    timed tests measure the algorithms, not compilation."""
    mesh = procgen.unit_cube()
    bvh = build_bvh(mesh)
    raycast_nearest(bvh, mesh, Ray(origin=np.array([0.5, 0.5, 5.0]),
                                   direction=np.array([0.0, 0.0, -1.0])))
    saliency_map(procgen.icosphere(1))


@pytest.fixture(scope="session")
def cube():
    return procgen.unit_cube()


@pytest.fixture(scope="session")
def cube_bvh(cube):
    return build_bvh(cube)


@pytest.fixture(scope="session")
def sphere():
    return procgen.icosphere(2)


@pytest.fixture(scope="session")
def sphere_bvh(sphere):
    return build_bvh(sphere)


@pytest.fixture
def front_camera():
    """Looks at the unit cube from +z, cube fully in frame."""
    return CameraPose(eye=[0.5, 0.5, 4.0], look_dir=[0.0, 0.0, -1.0],
                      up=[0.0, 1.0, 0.0], vfov=0.9, aspect=1.0,
                      near=0.01, far=100.0)


@pytest.fixture
def sphere_camera():
    """Looks at the origin-centered unit sphere from +z, fully in frame."""
    return CameraPose(eye=[0.0, 0.0, 3.5], look_dir=[0.0, 0.0, -1.0],
                      up=[0.0, 1.0, 0.0], vfov=1.0, aspect=1.0,
                      near=0.01, far=100.0)


def random_camera(rng: np.random.Generator, target=(0.5, 0.5, 0.5),
                  dist_lo: float = 2.0, dist_hi: float = 4.5) -> CameraPose:
    """Camera on a random orbit around ``target``, roughly framing it."""
    d = rng.normal(size=3)
    d /= np.linalg.norm(d)
    eye = np.asarray(target, dtype=np.float64) + d * rng.uniform(dist_lo, dist_hi)
    look = np.asarray(target, dtype=np.float64) - eye
    look += rng.normal(scale=0.05, size=3)
    up = rng.normal(size=3)
    while np.linalg.norm(np.cross(look, up)) < 1e-6:
        up = rng.normal(size=3)
    return CameraPose(eye=eye, look_dir=look, up=up,
                      vfov=rng.uniform(0.5, 1.2), aspect=rng.uniform(0.7, 1.6),
                      near=0.01, far=100.0)
