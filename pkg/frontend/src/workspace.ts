// The middle frame: renders the model and turns pointer input into
// either camera motion or selection gestures. The workspace never
// decides which faces a gesture covers; it draws exactly the face set
// the service last returned.

import { drawGestureTrace, drawMesh } from "./render";
import { clampNdc, pixelToNdc } from "./ndc";
import { RenderMesh } from "./objparse";
import { heatColor } from "./ramp";
import { Gesture, Rgb } from "./types";
import { ViewState } from "./viewstate";
import { AnnotationView } from "./wadm";

const DEFAULT_W = 960;
const DEFAULT_H = 640;
const LIVE_COLOR: Rgb = [255, 170, 0];
const BASE_COLOR: Rgb = [158, 168, 178];
// Drop gesture samples closer than this to the previous one; keeps
// payloads small without visibly changing the path.
const MIN_SAMPLE_PX = 4;

type Drag =
  | { kind: "orbit"; x: number; y: number }
  | { kind: "pan"; x: number; y: number }
  | { kind: "gesture" };

export interface WorkspaceCallbacks {
  onGesture: (gesture: Gesture) => void;
}

export class Workspace {
  readonly el: HTMLElement;
  readonly canvas: HTMLCanvasElement;
  private ctx: CanvasRenderingContext2D | null = null;
  private pendingEl: HTMLDivElement;
  private emptyEl: HTMLDivElement;

  mesh: RenderMesh | null = null;
  background = "#1d2129";
  showEdges = true;

  private liveFaces: number[] = [];
  private liveColor: Rgb = LIVE_COLOR;
  private annotations: AnnotationView[] = [];
  private heat: number[] | null = null; // normalized per-vertex values
  private gesturePixels: [number, number][] = [];
  private drag: Drag | null = null;

  constructor(private state: ViewState, private callbacks: WorkspaceCallbacks) {
    this.el = document.createElement("main");
    this.el.className = "workspace";
    this.el.setAttribute("aria-label", "Workspace");

    this.canvas = document.createElement("canvas");
    this.canvas.className = "workspace-canvas";
    this.canvas.width = DEFAULT_W;
    this.canvas.height = DEFAULT_H;
    this.el.appendChild(this.canvas);
    try {
      // headless DOMs hand back null here; state still works, only
      // painting is skipped
      this.ctx = this.canvas.getContext("2d");
    } catch {
      this.ctx = null;
    }

    this.pendingEl = document.createElement("div");
    this.pendingEl.className = "pending-indicator";
    this.pendingEl.textContent = "Selecting…";
    this.pendingEl.hidden = true;
    this.el.appendChild(this.pendingEl);

    this.emptyEl = document.createElement("div");
    this.emptyEl.className = "workspace-empty";
    this.emptyEl.textContent = "Load a model from the scene menu to begin.";
    this.el.appendChild(this.emptyEl);

    this.state.camera.aspect = DEFAULT_W / DEFAULT_H;

    this.canvas.addEventListener("mousedown", (ev) => this.onDown(ev));
    this.canvas.addEventListener("mousemove", (ev) => this.onMove(ev));
    window.addEventListener("mouseup", (ev) => this.onUp(ev));
    this.canvas.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      this.state.camera.zoom(Math.exp(ev.deltaY * 0.001));
      this.draw();
    });
    this.canvas.addEventListener("contextmenu", (ev) => ev.preventDefault());
  }

  width(): number {
    return this.canvas.width;
  }

  height(): number {
    return this.canvas.height;
  }

  resize(w: number, h: number) {
    this.canvas.width = w;
    this.canvas.height = h;
    this.state.camera.aspect = w / h;
    this.draw();
  }

  setMesh(mesh: RenderMesh | null) {
    this.mesh = mesh;
    this.liveFaces = [];
    this.heat = null;
    this.annotations = [];
    this.emptyEl.hidden = mesh !== null;
    if (mesh) {
      this.state.camera.frame(mesh.bboxMin, mesh.bboxMax);
    }
    this.draw();
  }

  setPending(pending: boolean) {
    this.pendingEl.hidden = !pending;
  }

  isPending(): boolean {
    return !this.pendingEl.hidden;
  }

  // The face set shown as the live selection: always the latest
  // service response, never computed here.
  setLiveSelection(faces: number[], color?: Rgb) {
    this.liveFaces = faces.slice();
    this.liveColor = color ?? LIVE_COLOR;
    this.draw();
  }

  highlightedFaces(): number[] {
    return this.liveFaces.slice();
  }

  setAnnotations(annotations: AnnotationView[]) {
    this.annotations = annotations;
    this.draw();
  }

  setHeat(values: number[] | null) {
    this.heat = values;
    this.draw();
  }

  heatValues(): number[] | null {
    return this.heat ? this.heat.slice() : null;
  }

  private pixelOf(ev: MouseEvent): [number, number] {
    const rect = this.canvas.getBoundingClientRect();
    return [ev.clientX - rect.left, ev.clientY - rect.top];
  }

  private onDown(ev: MouseEvent) {
    const [x, y] = this.pixelOf(ev);
    const selecting = this.state.mode !== "navigate" && ev.button === 0 && !ev.shiftKey;
    if (selecting && this.mesh && this.state.modelId) {
      this.drag = { kind: "gesture" };
      this.gesturePixels = [[x, y]];
      this.draw();
    } else if (ev.button === 1 || ev.shiftKey) {
      this.drag = { kind: "pan", x, y };
    } else if (ev.button === 0 || ev.button === 2) {
      this.drag = { kind: "orbit", x, y };
    }
  }

  private onMove(ev: MouseEvent) {
    if (!this.drag) return;
    const [x, y] = this.pixelOf(ev);
    if (this.drag.kind === "gesture") {
      const [lx, ly] = this.gesturePixels[this.gesturePixels.length - 1];
      if (Math.hypot(x - lx, y - ly) >= MIN_SAMPLE_PX) {
        this.gesturePixels.push([x, y]);
        this.draw();
      }
    } else if (this.drag.kind === "orbit") {
      this.state.camera.orbit(x - this.drag.x, y - this.drag.y);
      this.drag.x = x;
      this.drag.y = y;
      this.draw();
    } else {
      this.state.camera.pan(x - this.drag.x, y - this.drag.y, this.canvas.height);
      this.drag.x = x;
      this.drag.y = y;
      this.draw();
    }
  }

  private onUp(_ev: MouseEvent) {
    const drag = this.drag;
    this.drag = null;
    if (!drag || drag.kind !== "gesture") return;
    const pixels = this.gesturePixels;
    this.gesturePixels = [];
    this.draw();
    const gesture = this.buildGesture(pixels);
    if (gesture) this.callbacks.onGesture(gesture);
  }

  // Converts the pixel trail into the wire gesture. The camera pose
  // serialized here comes from the same object that projected the
  // frame, so the service sees exactly the view the user drew on.
  private buildGesture(pixels: [number, number][]): Gesture | null {
    const w = this.canvas.width;
    const h = this.canvas.height;
    const ndc: [number, number][] = pixels.map(([x, y]) => {
      const p = pixelToNdc(x, y, w, h);
      return [clampNdc(p.x), clampNdc(p.y)];
    });
    if (this.state.mode === "brush") {
      // one NDC radius for a round brush: scaled by the vertical axis,
      // matching the vertical field of view
      return {
        camera: this.state.camera.pose(),
        mode: "brush",
        stroke: { samples: ndc, radius: (2 * this.state.brushRadiusPx) / h },
      };
    }
    if (this.state.mode === "lasso") {
      if (ndc.length < 3) return null; // a degenerate click, not a lasso
      return {
        camera: this.state.camera.pose(),
        mode: "lasso",
        polygon: { vertices: ndc },
      };
    }
    return null;
  }

  draw() {
    if (!this.ctx) return;
    const w = this.canvas.width;
    const h = this.canvas.height;
    if (!this.mesh) {
      this.ctx.fillStyle = this.background;
      this.ctx.fillRect(0, 0, w, h);
      return;
    }

    const override = new Map<number, Rgb>();
    if (this.state.overlay.kind === "annotations") {
      for (const ann of this.annotations) {
        for (const f of ann.faces) override.set(f, ann.color);
      }
    }
    for (const f of this.liveFaces) override.set(f, this.liveColor);

    const mesh = this.mesh;
    const heat = this.state.overlay.kind === "heatmap" ? this.heat : null;
    drawMesh(this.ctx, this.state.camera, mesh, w, h, {
      background: this.background,
      baseColor: BASE_COLOR,
      showEdges: this.showEdges,
      faceColor: (f) => {
        const hit = override.get(f);
        if (hit) return hit;
        if (heat) {
          const a = mesh.faces[3 * f];
          const b = mesh.faces[3 * f + 1];
          const c = mesh.faces[3 * f + 2];
          return heatColor((heat[a] + heat[b] + heat[c]) / 3);
        }
        return null;
      },
    });

    if (this.gesturePixels.length > 0 && this.state.mode !== "navigate") {
      drawGestureTrace(this.ctx, this.gesturePixels, this.state.mode, this.state.brushRadiusPx);
    }
  }
}
