// What the UI is looking at and which tool is armed. One mode field
// means exactly one tool is active by construction; the brush radius
// setter keeps the positivity invariant.

import { OrbitCamera } from "./camera";
import { OverlayChoice, ToolMode } from "./types";

export class ViewState {
  readonly camera = new OrbitCamera();
  modelId: string | null = null;
  overlay: OverlayChoice = { kind: "annotations" };

  private _mode: ToolMode = "navigate";
  private _brushRadiusPx = 16;
  private listeners: (() => void)[] = [];

  get mode(): ToolMode {
    return this._mode;
  }

  set mode(m: ToolMode) {
    this._mode = m;
    this.notify();
  }

  get brushRadiusPx(): number {
    return this._brushRadiusPx;
  }

  set brushRadiusPx(r: number) {
    if (!(r > 0)) throw new Error(`brush radius must be positive, got ${r}`);
    this._brushRadiusPx = r;
    this.notify();
  }

  onChange(fn: () => void) {
    this.listeners.push(fn);
  }

  notify() {
    for (const fn of this.listeners) fn();
  }
}
