// Small software rasterizer: project with the orbit camera, sort
// faces back to front, fill 2D paths. Plenty for the desk-scale meshes
// the workspace shows, and it keeps one camera doing both rendering
// and gesture serialization. Headless DOMs return no 2D context; the
// workspace then skips painting but keeps all of its state.

import { OrbitCamera } from "./camera";
import { ndcToPixel } from "./ndc";
import { RenderMesh } from "./objparse";
import { Rgb } from "./types";

export interface RenderStyle {
  background: string;
  baseColor: Rgb;
  showEdges: boolean;
  // Returns an override fill for a face (highlight or overlay color),
  // or null to keep the shaded base color.
  faceColor: (face: number) => Rgb | null;
}

export function drawMesh(
  ctx: CanvasRenderingContext2D,
  camera: OrbitCamera,
  mesh: RenderMesh,
  w: number,
  h: number,
  style: RenderStyle,
) {
  ctx.fillStyle = style.background;
  ctx.fillRect(0, 0, w, h);

  const nv = mesh.positions.length / 3;
  const px = new Float64Array(nv);
  const py = new Float64Array(nv);
  const pd = new Float64Array(nv);
  const ok = new Uint8Array(nv);
  for (let i = 0; i < nv; i++) {
    const p = camera.project([
      mesh.positions[3 * i],
      mesh.positions[3 * i + 1],
      mesh.positions[3 * i + 2],
    ]);
    if (p === null) continue;
    const { px: sx, py: sy } = ndcToPixel(p[0], p[1], w, h);
    px[i] = sx;
    py[i] = sy;
    pd[i] = p[2];
    ok[i] = 1;
  }

  const nf = mesh.faces.length / 3;
  const order: number[] = [];
  const depth = new Float64Array(nf);
  for (let f = 0; f < nf; f++) {
    const a = mesh.faces[3 * f];
    const b = mesh.faces[3 * f + 1];
    const c = mesh.faces[3 * f + 2];
    if (!ok[a] || !ok[b] || !ok[c]) continue;
    depth[f] = (pd[a] + pd[b] + pd[c]) / 3;
    order.push(f);
  }
  order.sort((f1, f2) => depth[f2] - depth[f1]);

  const { look } = camera.basis();
  for (const f of order) {
    const a = mesh.faces[3 * f];
    const b = mesh.faces[3 * f + 1];
    const c = mesh.faces[3 * f + 2];
    const override = style.faceColor(f);
    let rgb: Rgb;
    if (override) {
      rgb = override;
    } else {
      // flat shading against the view direction
      const ux = mesh.positions[3 * b] - mesh.positions[3 * a];
      const uy = mesh.positions[3 * b + 1] - mesh.positions[3 * a + 1];
      const uz = mesh.positions[3 * b + 2] - mesh.positions[3 * a + 2];
      const vx = mesh.positions[3 * c] - mesh.positions[3 * a];
      const vy = mesh.positions[3 * c + 1] - mesh.positions[3 * a + 1];
      const vz = mesh.positions[3 * c + 2] - mesh.positions[3 * a + 2];
      const nx = uy * vz - uz * vy;
      const ny = uz * vx - ux * vz;
      const nz = ux * vy - uy * vx;
      const nn = Math.sqrt(nx * nx + ny * ny + nz * nz) || 1;
      const facing = Math.abs((nx * look[0] + ny * look[1] + nz * look[2]) / nn);
      const lum = 0.35 + 0.65 * facing;
      rgb = [
        Math.round(style.baseColor[0] * lum),
        Math.round(style.baseColor[1] * lum),
        Math.round(style.baseColor[2] * lum),
      ];
    }
    ctx.fillStyle = `rgb(${rgb[0]}, ${rgb[1]}, ${rgb[2]})`;
    ctx.beginPath();
    ctx.moveTo(px[a], py[a]);
    ctx.lineTo(px[b], py[b]);
    ctx.lineTo(px[c], py[c]);
    ctx.closePath();
    ctx.fill();
    if (style.showEdges) {
      ctx.strokeStyle = "rgba(0, 0, 0, 0.25)";
      ctx.lineWidth = 0.5;
      ctx.stroke();
    }
  }
}

// Echo of an in-progress gesture so the user sees what will be
// submitted: the lasso outline, or the brush path with its radius.
export function drawGestureTrace(
  ctx: CanvasRenderingContext2D,
  pixels: [number, number][],
  mode: "brush" | "lasso",
  brushRadiusPx: number,
) {
  if (pixels.length === 0) return;
  ctx.strokeStyle = "rgba(255, 170, 0, 0.9)";
  ctx.lineWidth = mode === "brush" ? brushRadiusPx * 2 : 1.5;
  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  ctx.beginPath();
  ctx.moveTo(pixels[0][0], pixels[0][1]);
  for (let i = 1; i < pixels.length; i++) ctx.lineTo(pixels[i][0], pixels[i][1]);
  if (mode === "lasso") ctx.closePath();
  if (mode === "brush" && pixels.length === 1) {
    ctx.arc(pixels[0][0], pixels[0][1], brushRadiusPx, 0, 2 * Math.PI);
    ctx.fillStyle = "rgba(255, 170, 0, 0.4)";
    ctx.fill();
  } else {
    ctx.globalAlpha = mode === "brush" ? 0.4 : 1;
    ctx.stroke();
    ctx.globalAlpha = 1;
  }
}
