// Verdict badges must be a pure projection of the server report: for the
// same design and plant family they match the CLI shape report exactly.

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { deriveBadges } from "../src/badges.js";
import type { EvaluateResponse, LoopReport } from "../src/types.js";

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8"));
}

const evalResponse = fixture<EvaluateResponse>("eval_reference.json");
const shapeReport = fixture<{ report: LoopReport }>("shape_report.json");

describe("deriveBadges", () => {
  it("matches the CLI shape report verdict for verdict", () => {
    const ui = deriveBadges(evalResponse.report);
    const cli = shapeReport.report.per_frequency;
    expect(ui.perFrequency.length).toBe(cli.length);
    ui.perFrequency.forEach((badge, i) => {
      expect(badge.omega).toBe(cli[i].omega);
      expect(badge.tracking === "pass").toBe(cli[i].tracking_ok);
      expect(badge.disturbance === "pass").toBe(cli[i].disturbance_ok);
    });
    expect(ui.nominalStable).toBe(shapeReport.report.nominal_stable);
    expect(ui.robustStable).toBe(shapeReport.report.robust_stable);
    expect(ui.allSpecsOk).toBe(shapeReport.report.all_specs_ok);
  });

  it("exposes worst-case magnitudes verbatim from the server", () => {
    const ui = deriveBadges(evalResponse.report);
    ui.perFrequency.forEach((badge, i) => {
      expect(badge.worstTracking).toBe(
        evalResponse.report.per_frequency[i].worst_tracking,
      );
      expect(badge.worstDisturbance).toBe(
        evalResponse.report.per_frequency[i].worst_disturbance,
      );
    });
  });

  it("collects violated frequencies for chart highlighting", () => {
    const ui = deriveBadges(evalResponse.report);
    const expected = evalResponse.report.per_frequency
      .filter((v) => !v.tracking_ok || !v.disturbance_ok)
      .map((v) => v.omega);
    expect(ui.violatedFrequencies).toEqual(expected);
    // the bundled design is known to miss the disturbance cap at 2 rad/s
    expect(ui.violatedFrequencies).toContain(2.0);
  });
});
