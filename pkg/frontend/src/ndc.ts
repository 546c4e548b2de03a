// Bridges pointer pixels to the service's screen space. NDC x grows
// right and y grows up, both spanning [-1, 1]; pixel y grows down from
// the top-left corner, so the y axis flips.

export interface NdcPoint {
  x: number;
  y: number;
}

function checkViewport(w: number, h: number) {
  if (!(w > 0) || !(h > 0)) {
    throw new Error(`viewport must have positive size, got ${w}x${h}`);
  }
}

export function pixelToNdc(px: number, py: number, w: number, h: number): NdcPoint {
  checkViewport(w, h);
  return { x: (2 * px) / w - 1, y: 1 - (2 * py) / h };
}

// Algebraic inverse of pixelToNdc.
export function ndcToPixel(x: number, y: number, w: number, h: number): { px: number; py: number } {
  checkViewport(w, h);
  return { px: ((x + 1) * w) / 2, py: ((1 - y) * h) / 2 };
}

// The selection endpoints reject coordinates outside the NDC square,
// and drags may leave the canvas; gesture samples are clamped.
export function clampNdc(v: number): number {
  return v < -1 ? -1 : v > 1 ? 1 : v;
}
