// Fixed heat-map color ramp: three anchored stops interpolated
// linearly in sRGB. 0 is a cool deep blue, 0.5 pale yellow, 1 a hot
// dark red. Inputs outside [0, 1] clamp to the ends. The legend in the
// tools menu renders the same stops, so what the ramp documents is
// what the workspace shows.

import { Rgb } from "./types";

export const RAMP_STOPS: [number, Rgb][] = [
  [0.0, [49, 54, 149]],
  [0.5, [255, 255, 191]],
  [1.0, [165, 0, 38]],
];

export function heatColor(value: number): Rgb {
  const v = value <= 0 ? 0 : value >= 1 ? 1 : value;
  for (let i = 1; i < RAMP_STOPS.length; i++) {
    const [t1, c1] = RAMP_STOPS[i];
    if (v <= t1) {
      const [t0, c0] = RAMP_STOPS[i - 1];
      const f = (v - t0) / (t1 - t0);
      return [
        Math.round(c0[0] + f * (c1[0] - c0[0])),
        Math.round(c0[1] + f * (c1[1] - c0[1])),
        Math.round(c0[2] + f * (c1[2] - c0[2])),
      ];
    }
  }
  return RAMP_STOPS[RAMP_STOPS.length - 1][1];
}

export function rampGradientCss(): string {
  const stops = RAMP_STOPS.map(
    ([t, [r, g, b]]) => `rgb(${r}, ${g}, ${b}) ${t * 100}%`,
  );
  return `linear-gradient(to right, ${stops.join(", ")})`;
}
