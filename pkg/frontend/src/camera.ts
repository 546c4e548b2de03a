// Orbit camera over the service's pinhole convention: a right-handed
// basis (right, up, -look) with vfov measured vertically, and
// projection x = (v.right) / (z tan(vfov/2) aspect),
// y = (v.up) / (z tan(vfov/2)), z = v.look. Points nearer than the
// near plane do not project. This object is the single source of
// camera truth: the renderer projects through it and gestures
// serialize it, so the pose the service sees is exactly the pose that
// produced the pixels.

import { CameraPoseDict, Vec3 } from "./types";

const WORLD_UP: Vec3 = [0, 1, 0];
const MIN_DISTANCE = 1e-3;
const MAX_PITCH = Math.PI / 2 - 1e-3;
const ORBIT_PER_PIXEL = 0.008;

function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function dot(a: Vec3, b: Vec3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

function norm(a: Vec3): number {
  return Math.sqrt(dot(a, a));
}

function normalize(a: Vec3): Vec3 {
  const n = norm(a);
  if (n < 1e-12) throw new Error("cannot normalize a zero vector");
  return [a[0] / n, a[1] / n, a[2] / n];
}

export interface CameraBasis {
  look: Vec3;
  right: Vec3;
  up: Vec3;
}

export class OrbitCamera {
  target: Vec3 = [0, 0, 0];
  distance = 3;
  // Yaw spins about the world y axis; yaw 0, pitch 0 looks down -z
  // from +z. Pitch raises the eye above the target.
  yaw = 0;
  pitch = 0;
  vfov = 0.9;
  aspect = 1;
  near = 0.01;
  far = 100;

  eye(): Vec3 {
    const cp = Math.cos(this.pitch);
    const offset: Vec3 = [
      cp * Math.sin(this.yaw) * this.distance,
      Math.sin(this.pitch) * this.distance,
      cp * Math.cos(this.yaw) * this.distance,
    ];
    return [
      this.target[0] + offset[0],
      this.target[1] + offset[1],
      this.target[2] + offset[2],
    ];
  }

  // Orthonormalized the same way the service does it: look wins, the
  // up hint only picks the roll.
  basis(): CameraBasis {
    const look = normalize(sub(this.target, this.eye()));
    const right = normalize(cross(look, WORLD_UP));
    const up = cross(right, look);
    return { look, right, up };
  }

  pose(): CameraPoseDict {
    const { look, up } = this.basis();
    return {
      eye: this.eye(),
      look_dir: look,
      up,
      vfov: this.vfov,
      aspect: this.aspect,
      near: this.near,
      far: this.far,
    };
  }

  // Returns [ndcX, ndcY, eyeDistance] or null when the point lies
  // nearer than the near plane.
  project(p: Vec3): [number, number, number] | null {
    const eye = this.eye();
    const { look, right, up } = this.basis();
    const v = sub(p, eye);
    const z = dot(v, look);
    if (z < this.near) return null;
    const ta = Math.tan(this.vfov / 2);
    return [dot(v, right) / (z * ta * this.aspect), dot(v, up) / (z * ta), norm(v)];
  }

  orbit(dxPx: number, dyPx: number) {
    this.yaw -= dxPx * ORBIT_PER_PIXEL;
    this.pitch += dyPx * ORBIT_PER_PIXEL;
    if (this.pitch > MAX_PITCH) this.pitch = MAX_PITCH;
    if (this.pitch < -MAX_PITCH) this.pitch = -MAX_PITCH;
  }

  // Slides the target in the view plane so the scene follows the
  // pointer; viewportH scales pixels to world units at the target.
  pan(dxPx: number, dyPx: number, viewportH: number) {
    const { right, up } = this.basis();
    const perPixel = (2 * this.distance * Math.tan(this.vfov / 2)) / viewportH;
    for (let i = 0; i < 3; i++) {
      this.target[i] -= right[i] * dxPx * perPixel;
      this.target[i] += up[i] * dyPx * perPixel;
    }
  }

  zoom(factor: number) {
    this.distance = Math.max(MIN_DISTANCE, this.distance * factor);
  }

  // Re-aims at a bounding box: target the center, back off far enough
  // to see all of it, and spread near/far around the new distance.
  frame(bboxMin: Vec3, bboxMax: Vec3) {
    const center: Vec3 = [
      (bboxMin[0] + bboxMax[0]) / 2,
      (bboxMin[1] + bboxMax[1]) / 2,
      (bboxMin[2] + bboxMax[2]) / 2,
    ];
    const diag = norm(sub(bboxMax, bboxMin));
    const radius = Math.max(diag / 2, 1e-6);
    this.target = center;
    this.distance = radius / Math.tan(this.vfov / 2) + radius;
    this.near = Math.max(this.distance / 1000, 1e-6);
    this.far = this.distance + 10 * radius;
  }
}
