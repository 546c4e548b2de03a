"""Pinhole camera: NDC pick rays and point projection.

Conventions: NDC x grows right, y grows up, both spanning [-1, 1]. The
basis (right, up, -look_dir) is right-handed, the usual view space with
the camera looking down its own negative z. ``project_point`` returns
the Euclidean distance to the eye as depth, so that marching the
matching pick ray by exactly that distance reproduces the point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bvh import Ray


def _unit(v: np.ndarray, what: str) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n < 1e-12:
        raise ValueError(f"{what} must be a nonzero vector")
    return v / n


@dataclass(frozen=True, eq=False)
class CameraPose:
    """Eye position plus orientation and frustum parameters.

    ``look_dir`` and ``up`` are orthonormalized on construction
    (look_dir wins; up is re-derived via the right vector), after which
    ``right``/``up`` form an exact orthonormal basis with ``look_dir``.
    """

    eye: np.ndarray
    look_dir: np.ndarray
    up: np.ndarray
    vfov: float
    aspect: float
    near: float
    far: float

    def __post_init__(self):
        eye = np.asarray(self.eye, dtype=np.float64).reshape(3)
        look = _unit(np.asarray(self.look_dir, dtype=np.float64).reshape(3), "look_dir")
        up_in = np.asarray(self.up, dtype=np.float64).reshape(3)
        if not (0.0 < self.vfov < math.pi):
            raise ValueError(f"vfov must be in (0, pi), got {self.vfov}")
        if not self.aspect > 0.0:
            raise ValueError(f"aspect must be positive, got {self.aspect}")
        if not (0.0 < self.near < self.far):
            raise ValueError(f"need 0 < near < far, got near={self.near} far={self.far}")
        right = np.cross(look, up_in)
        nr = float(np.linalg.norm(right))
        if nr < 1e-12:
            raise ValueError("up is parallel to look_dir")
        right /= nr
        up = np.cross(right, look)
        object.__setattr__(self, "eye", eye)
        object.__setattr__(self, "look_dir", look)
        object.__setattr__(self, "up", up)
        object.__setattr__(self, "_right", right)

    @property
    def right(self) -> np.ndarray:
        return self._right

    def to_dict(self) -> dict:
        return {
            "eye": [float(c) for c in self.eye],
            "look_dir": [float(c) for c in self.look_dir],
            "up": [float(c) for c in self.up],
            "vfov": float(self.vfov),
            "aspect": float(self.aspect),
            "near": float(self.near),
            "far": float(self.far),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CameraPose":
        try:
            return cls(
                eye=np.asarray(d["eye"], dtype=np.float64),
                look_dir=np.asarray(d["look_dir"], dtype=np.float64),
                up=np.asarray(d["up"], dtype=np.float64),
                vfov=float(d["vfov"]),
                aspect=float(d["aspect"]),
                near=float(d["near"]),
                far=float(d["far"]),
            )
        except KeyError as exc:
            raise ValueError(f"camera dict missing key {exc.args[0]!r}")


@dataclass(frozen=True)
class ScreenPoint:
    """NDC point; both coordinates must lie in [-1, 1]."""

    x: float
    y: float

    def __post_init__(self):
        if not (abs(self.x) <= 1.0 and abs(self.y) <= 1.0):
            raise ValueError(f"screen point outside NDC square: ({self.x}, {self.y})")


def pick_ray(camera: CameraPose, p: ScreenPoint) -> Ray:
    """Ray from the eye through NDC point p on the image plane."""
    ta = math.tan(camera.vfov / 2.0)
    d = (
        camera.look_dir
        + p.x * ta * camera.aspect * camera.right
        + p.y * ta * camera.up
    )
    return Ray(origin=camera.eye, direction=d / np.linalg.norm(d))


def project_point(camera: CameraPose, q) -> tuple[float, float, float] | None:
    """Project a world point to NDC.

    Returns (x, y, depth) where depth is the Euclidean eye distance, or
    None when the point lies nearer than the near plane. Coordinates
    are not clamped: off-screen points project outside [-1, 1].
    """
    v = np.asarray(q, dtype=np.float64).reshape(3) - camera.eye
    z = float(v @ camera.look_dir)
    if z < camera.near:
        return None
    ta = math.tan(camera.vfov / 2.0)
    x = float(v @ camera.right) / (z * ta * camera.aspect)
    y = float(v @ camera.up) / (z * ta)
    return x, y, float(np.linalg.norm(v))


def project_points(camera: CameraPose, pts: np.ndarray):
    """Vectorized ``project_point``.

    Args:
        pts: (N, 3) world points.

    Returns:
        (x, y, depth, valid) arrays; entries with valid False hold NaN.
    """
    pts = np.asarray(pts, dtype=np.float64)
    v = pts - camera.eye
    z = v @ camera.look_dir
    valid = z >= camera.near
    ta = math.tan(camera.vfov / 2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = (v @ camera.right) / (z * ta * camera.aspect)
        y = (v @ camera.up) / (z * ta)
    x = np.where(valid, x, np.nan)
    y = np.where(valid, y, np.nan)
    depth = np.where(valid, np.linalg.norm(v, axis=1), np.nan)
    return x, y, depth, valid
