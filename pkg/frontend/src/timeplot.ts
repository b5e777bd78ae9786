/** Time-response preview geometry: overlaid open/closed traces from a
 * server simulation payload. */

import type { SimulateResponse } from "./types.js";

export interface TracePoint {
  t: number;
  value: number;
}

export interface ResponsePreview {
  open: TracePoint[];
  closed: TracePoint[];
  peakOpen: number | null;
  peakClosed: number | null;
  quantity: "x_a" | "x_a_ddot";
}

export function buildPreview(
  sim: SimulateResponse,
  quantity: "x_a" | "x_a_ddot" = "x_a",
): ResponsePreview {
  const open = sim.open
    ? sim.open.t.map((ti, i) => ({ t: ti, value: sim.open![quantity][i] }))
    : [];
  const closed = sim.closed
    ? sim.closed.t.map((ti, i) => ({ t: ti, value: sim.closed![quantity][i] }))
    : [];
  const metricKey = quantity === "x_a" ? "peak_disp" : "peak_accel";
  return {
    open,
    closed,
    peakOpen: sim.open ? sim.open.metrics[metricKey] : null,
    peakClosed: sim.closed ? sim.closed.metrics[metricKey] : null,
    quantity,
  };
}

export function tracePath(
  points: TracePoint[],
  width: number,
  height: number,
  tMax: number,
  valueAbsMax: number,
): string {
  if (points.length === 0 || tMax <= 0) return "";
  const span = valueAbsMax > 0 ? 2 * valueAbsMax : 1;
  return points
    .map((p, i) => {
      const x = (p.t / tMax) * width;
      const y = height / 2 - (p.value / span) * height;
      return `${i === 0 ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`;
    })
    .join(" ");
}
