// Display-side mesh loading. Only positions and face indices matter
// here; normals and UVs are skipped. Face order must match the
// service's parser exactly (file order, polygons fan-triangulated from
// the first corner), because the face indices it returns are indices
// into that order.

import { Vec3 } from "./types";

export interface RenderMesh {
  positions: Float64Array; // xyz per vertex
  faces: Uint32Array; // three vertex indices per face
  bboxMin: Vec3;
  bboxMax: Vec3;
}

function buildMesh(positions: number[], faces: number[]): RenderMesh {
  if (faces.length === 0) throw new Error("mesh has no faces");
  const bboxMin: Vec3 = [Infinity, Infinity, Infinity];
  const bboxMax: Vec3 = [-Infinity, -Infinity, -Infinity];
  for (let i = 0; i < positions.length; i += 3) {
    for (let a = 0; a < 3; a++) {
      if (positions[i + a] < bboxMin[a]) bboxMin[a] = positions[i + a];
      if (positions[i + a] > bboxMax[a]) bboxMax[a] = positions[i + a];
    }
  }
  return {
    positions: Float64Array.from(positions),
    faces: Uint32Array.from(faces),
    bboxMin,
    bboxMax,
  };
}

function resolveIndex(idx: number, count: number, lineNo: number): number {
  const r = idx > 0 ? idx - 1 : count + idx;
  if (idx === 0 || r < 0 || r >= count) {
    throw new Error(`vertex index ${idx} out of range on line ${lineNo}`);
  }
  return r;
}

export function parseObj(text: string): RenderMesh {
  const positions: number[] = [];
  const faces: number[] = [];
  const lines = text.split(/\r?\n/);
  for (let n = 0; n < lines.length; n++) {
    const line = lines[n].trim();
    if (!line || line.startsWith("#")) continue;
    const parts = line.split(/\s+/);
    if (parts[0] === "v") {
      if (parts.length < 4) throw new Error(`v needs 3 coordinates on line ${n + 1}`);
      positions.push(Number(parts[1]), Number(parts[2]), Number(parts[3]));
    } else if (parts[0] === "f") {
      const corners: number[] = [];
      for (let i = 1; i < parts.length; i++) {
        const vi = parseInt(parts[i].split("/")[0], 10);
        corners.push(resolveIndex(vi, positions.length / 3, n + 1));
      }
      if (corners.length < 3) throw new Error(`face needs 3 corners on line ${n + 1}`);
      for (let i = 1; i < corners.length - 1; i++) {
        faces.push(corners[0], corners[i], corners[i + 1]);
      }
    }
    // vn/vt/mtllib/usemtl and friends are irrelevant for display
  }
  return buildMesh(positions, faces);
}

export function parsePlyAscii(text: string): RenderMesh {
  const lines = text.split(/\r?\n/);
  let i = 0;
  const next = () => lines[i++]?.trim() ?? "";

  if (next() !== "ply") throw new Error("not a PLY file");
  let vertexCount = -1;
  let faceCount = -1;
  // property column offsets of x/y/z within the vertex element
  const coord: Record<string, number> = {};
  let vertexProps = 0;
  let element = "";
  for (;;) {
    const line = next();
    if (!line) throw new Error("unterminated PLY header");
    const parts = line.split(/\s+/);
    if (parts[0] === "format") {
      if (parts[1] !== "ascii") {
        throw new Error("binary PLY is not supported for display");
      }
    } else if (parts[0] === "element") {
      element = parts[1];
      if (element === "vertex") vertexCount = parseInt(parts[2], 10);
      if (element === "face") faceCount = parseInt(parts[2], 10);
    } else if (parts[0] === "property" && element === "vertex" && parts[1] !== "list") {
      const name = parts[parts.length - 1];
      if (name === "x" || name === "y" || name === "z") coord[name] = vertexProps;
      vertexProps++;
    } else if (parts[0] === "end_header") {
      break;
    }
  }
  if (vertexCount < 0 || faceCount < 0) throw new Error("PLY header lacks vertex or face element");
  if (!("x" in coord) || !("y" in coord) || !("z" in coord)) {
    throw new Error("PLY vertex element lacks x/y/z");
  }

  const positions: number[] = [];
  for (let v = 0; v < vertexCount; v++) {
    const parts = next().split(/\s+/);
    positions.push(Number(parts[coord.x]), Number(parts[coord.y]), Number(parts[coord.z]));
  }
  const faces: number[] = [];
  for (let f = 0; f < faceCount; f++) {
    const parts = next().split(/\s+/).map(Number);
    const k = parts[0];
    if (k < 3) throw new Error(`face ${f} has fewer than 3 corners`);
    for (let c = 2; c < k; c++) {
      faces.push(parts[1], parts[c], parts[c + 1]);
    }
  }
  return buildMesh(positions, faces);
}

export function parseModel(data: ArrayBuffer, format: string): RenderMesh {
  const text = new TextDecoder().decode(data);
  if (format === "ply") return parsePlyAscii(text);
  return parseObj(text);
}
