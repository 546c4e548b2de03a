import { describe, expect, it } from "vitest";

import { OrbitCamera } from "../src/camera";
import { Vec3 } from "../src/types";

function dot(a: number[], b: number[]): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

function makeCamera(): OrbitCamera {
  const cam = new OrbitCamera();
  cam.target = [0.2, -0.3, 0.5];
  cam.distance = 2.5;
  cam.yaw = 0.7;
  cam.pitch = 0.4;
  cam.vfov = 0.9;
  cam.aspect = 1.5;
  cam.near = 0.01;
  cam.far = 100;
  return cam;
}

describe("OrbitCamera.project", () => {
  // Frozen outputs of the service's own projection for the same pose;
  // the renderer and the select endpoint must agree on where a world
  // point lands on screen.
  const cases: [Vec3, [number, number, number]][] = [
    [[0, 0, 0], [0.08178869245070583, 0.3448333287238092, 2.8983447057048597]],
    [[0.5, 0.6, -0.2], [0.381000891578575, 0.8081798469903567, 2.7318865007597886]],
    [[1, -1, 2], [-0.3941194766600561, -2.155221541878097, 1.826475232536097]],
  ];

  it("matches the service projection on frozen cases", () => {
    const cam = makeCamera();
    expect(cam.eye()[0]).toBeCloseTo(1.6834094584034685, 12);
    expect(cam.eye()[1]).toBeCloseTo(0.6735458557716263, 12);
    expect(cam.eye()[2]).toBeCloseTo(2.261165763188979, 12);
    for (const [point, [x, y, d]] of cases) {
      const r = cam.project(point);
      expect(r).not.toBeNull();
      expect(r![0]).toBeCloseTo(x, 12);
      expect(r![1]).toBeCloseTo(y, 12);
      expect(r![2]).toBeCloseTo(d, 12);
    }
  });

  it("projects the target to the screen center at its distance", () => {
    const cam = makeCamera();
    const r = cam.project(cam.target)!;
    expect(r[0]).toBeCloseTo(0, 12);
    expect(r[1]).toBeCloseTo(0, 12);
    expect(r[2]).toBeCloseTo(cam.distance, 12);
  });

  it("returns null for points nearer than the near plane", () => {
    const cam = makeCamera();
    const behind: Vec3 = [cam.eye()[0], cam.eye()[1], cam.eye()[2] + 5];
    expect(cam.project(behind)).toBeNull();
  });
});

describe("OrbitCamera.pose", () => {
  it("serializes an orthonormal right-handed basis", () => {
    const cam = makeCamera();
    cam.orbit(37, -12);
    cam.pan(10, -4, 600);
    cam.zoom(1.3);
    const pose = cam.pose();
    expect(dot(pose.look_dir, pose.look_dir)).toBeCloseTo(1, 12);
    expect(dot(pose.up, pose.up)).toBeCloseTo(1, 12);
    expect(dot(pose.look_dir, pose.up)).toBeCloseTo(0, 12);
    expect(pose.vfov).toBe(cam.vfov);
    expect(pose.aspect).toBe(cam.aspect);
    expect(pose.near).toBeLessThan(pose.far);
  });

  it("is the same camera the renderer projects through", () => {
    // project() rebuilt from the serialized pose alone must agree with
    // the camera's own projection: one source of truth.
    const cam = makeCamera();
    const pose = cam.pose();
    const p: Vec3 = [0.1, 0.2, -0.4];
    const v = [p[0] - pose.eye[0], p[1] - pose.eye[1], p[2] - pose.eye[2]];
    const z = dot(v, pose.look_dir);
    const right = [
      pose.look_dir[1] * pose.up[2] - pose.look_dir[2] * pose.up[1],
      pose.look_dir[2] * pose.up[0] - pose.look_dir[0] * pose.up[2],
      pose.look_dir[0] * pose.up[1] - pose.look_dir[1] * pose.up[0],
    ];
    const ta = Math.tan(pose.vfov / 2);
    const fromPose = [dot(v, right) / (z * ta * pose.aspect), dot(v, pose.up) / (z * ta)];
    const direct = cam.project(p)!;
    expect(direct[0]).toBeCloseTo(fromPose[0], 12);
    expect(direct[1]).toBeCloseTo(fromPose[1], 12);
  });

  it("clamps pitch and keeps distance positive", () => {
    const cam = makeCamera();
    cam.orbit(0, 100000);
    expect(cam.pitch).toBeLessThan(Math.PI / 2);
    cam.zoom(1e-12);
    expect(cam.distance).toBeGreaterThan(0);
  });
});

describe("OrbitCamera.frame", () => {
  it("aims at the box center and fits the whole box in view", () => {
    const cam = makeCamera();
    cam.frame([0, 0, 0], [1, 1, 1]);
    expect(cam.target).toEqual([0.5, 0.5, 0.5]);
    for (const corner of [
      [0, 0, 0],
      [1, 1, 1],
      [0, 1, 0],
      [1, 0, 1],
    ] as Vec3[]) {
      const r = cam.project(corner);
      expect(r).not.toBeNull();
      expect(Math.abs(r![0])).toBeLessThanOrEqual(1);
      expect(Math.abs(r![1])).toBeLessThanOrEqual(1);
    }
  });
});
