/** Nichols-chart geometry: pure coordinate math and SVG path building.
 *
 * Axes are open-loop phase in degrees over (-360, 0] (matching the
 * service's convention) against magnitude in dB.  All inputs are server
 * payloads; nothing is recomputed locally.
 */

import type { LoopPlaneBound, LoopSample, TemplateSet } from "./types.js";

export interface ChartScale {
  phaseMin: number;
  phaseMax: number;
  dbMin: number;
  dbMax: number;
  width: number;
  height: number;
  padLeft: number;
  padTop: number;
}

export function defaultScale(width = 900, height = 600): ChartScale {
  return {
    phaseMin: -360,
    phaseMax: 0,
    dbMin: -60,
    dbMax: 80,
    width,
    height,
    padLeft: 50,
    padTop: 10,
  };
}

/** Wrap any phase into the (-360, 0] convention. */
export function wrapPhase(deg: number): number {
  let p = deg % 360;
  if (p > 0) p -= 360;
  if (p <= -360) p += 360;
  return p === 0 ? 0 : p;
}

export function phaseToX(scale: ChartScale, phaseDeg: number): number {
  const span = scale.phaseMax - scale.phaseMin;
  const usable = scale.width - scale.padLeft;
  return scale.padLeft + ((phaseDeg - scale.phaseMin) / span) * usable;
}

export function dbToY(scale: ChartScale, db: number): number {
  const span = scale.dbMax - scale.dbMin;
  const usable = scale.height - scale.padTop;
  const clamped = Math.min(Math.max(db, scale.dbMin), scale.dbMax);
  return scale.padTop + ((scale.dbMax - clamped) / span) * usable;
}

export function pixelsPerDb(scale: ChartScale): number {
  return (scale.height - scale.padTop) / (scale.dbMax - scale.dbMin);
}

/** Polyline path for the nominal loop; splits on phase wraparounds so the
 * curve does not streak across the chart. */
export function loopPath(scale: ChartScale, samples: LoopSample[]): string {
  const parts: string[] = [];
  let pen = false;
  let prevPhase = 0;
  for (const s of samples) {
    const x = phaseToX(scale, s.phase_deg);
    const y = dbToY(scale, s.mag_db);
    const jump = pen && Math.abs(s.phase_deg - prevPhase) > 180;
    parts.push(`${!pen || jump ? "M" : "L"}${x.toFixed(2)},${y.toFixed(2)}`);
    pen = true;
    prevPhase = s.phase_deg;
  }
  return parts.join(" ");
}

export interface Marker {
  omega: number;
  x: number;
  y: number;
  violated: boolean;
}

export function frequencyMarkers(
  scale: ChartScale,
  samples: LoopSample[],
  violatedFrequencies: number[],
): Marker[] {
  const bad = new Set(violatedFrequencies);
  return samples
    .filter((s) => s.is_design_freq)
    .map((s) => ({
      omega: s.omega,
      x: phaseToX(scale, s.phase_deg),
      y: dbToY(scale, s.mag_db),
      violated: bad.has(s.omega),
    }));
}

export interface BoundSegment {
  x: number;
  yTop: number;
  yBottom: number;
  forbidden: boolean;
}

/** Vertical strokes of the allowed gain intervals per bound point; a phase
 * with an empty feasible set renders as one full-height forbidden span. */
export function boundSegments(scale: ChartScale, bound: LoopPlaneBound): BoundSegment[] {
  const out: BoundSegment[] = [];
  for (const pt of bound.points) {
    const x = phaseToX(scale, wrapPhase(pt.phase_deg));
    if (pt.intervals.length === 0) {
      out.push({
        x,
        yTop: dbToY(scale, scale.dbMax),
        yBottom: dbToY(scale, scale.dbMin),
        forbidden: true,
      });
      continue;
    }
    for (const iv of pt.intervals) {
      out.push({
        x,
        yTop: dbToY(scale, iv.hi_db),
        yBottom: dbToY(scale, iv.lo_db),
        forbidden: false,
      });
    }
  }
  return out;
}

export interface TemplateDot {
  x: number;
  y: number;
  nominal: boolean;
}

export function templateDots(scale: ChartScale, t: TemplateSet): TemplateDot[] {
  return t.points.map((p) => ({
    x: phaseToX(scale, p.phase_deg),
    y: dbToY(scale, p.mag_db),
    nominal: p.is_nominal,
  }));
}
