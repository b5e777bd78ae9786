/** Verdict badges: a pure projection of the server's loop report.
 *
 * The UI derives pass/fail markers directly from the per-frequency
 * verdicts; it never recomputes the underlying magnitudes, so the badges
 * are identical to what the CLI prints for the same design and family.
 */

import type { LoopReport } from "./types.js";

export interface FrequencyBadge {
  omega: number;
  tracking: "pass" | "fail";
  disturbance: "pass" | "fail";
  worstTracking: number | null;
  worstDisturbance: number | null;
}

export interface BadgeSummary {
  perFrequency: FrequencyBadge[];
  nominalStable: boolean;
  robustStable: boolean;
  allSpecsOk: boolean;
  violatedFrequencies: number[];
}

export function deriveBadges(report: LoopReport): BadgeSummary {
  const perFrequency = report.per_frequency.map((v) => ({
    omega: v.omega,
    tracking: v.tracking_ok ? ("pass" as const) : ("fail" as const),
    disturbance: v.disturbance_ok ? ("pass" as const) : ("fail" as const),
    worstTracking: v.worst_tracking,
    worstDisturbance: v.worst_disturbance,
  }));
  return {
    perFrequency,
    nominalStable: report.nominal_stable,
    robustStable: report.robust_stable,
    allSpecsOk: report.all_specs_ok,
    violatedFrequencies: report.per_frequency
      .filter((v) => !v.tracking_ok || !v.disturbance_ok)
      .map((v) => v.omega),
  };
}
