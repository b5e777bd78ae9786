/** Payload types mirroring the qftlab service JSON schemas. */

export interface SessionInfo {
  id: string;
  frequencies: number[];
  num_plants: number;
  levels: number;
  revision: number;
  w_st: number;
  w_sd: number;
  controller_file: string | null;
}

export interface TemplatePoint {
  re: number;
  im: number;
  phase_deg: number;
  mag_db: number;
  is_nominal: boolean;
}

export interface TemplateSet {
  omega: number;
  nominal_index: number;
  points: TemplatePoint[];
}

export interface DbInterval {
  lo_db: number;
  hi_db: number;
  lo_truncated: boolean;
  hi_truncated: boolean;
}

export interface LoopPlaneBoundPoint {
  phase_deg: number;
  intervals: DbInterval[];
}

export interface LoopPlaneBound {
  omega: number;
  spec_kind: string;
  points: LoopPlaneBoundPoint[];
}

export interface ControllerPlaneBound {
  omega: number;
  spec_kind: string;
  phases: number[];
  gain_sets: DbInterval[][];
  empty_phases: number[];
}

export interface BoundsPayload {
  controller_plane: Record<string, ControllerPlaneBound[]>;
  loop_plane: Record<string, LoopPlaneBound[]>;
}

export interface FrequencyVerdict {
  omega: number;
  worst_tracking: number | null;
  worst_disturbance: number | null;
  tracking_ok: boolean;
  disturbance_ok: boolean;
  tracking_margin_db: number | null;
  disturbance_margin_db: number | null;
}

export interface LoopReport {
  per_frequency: FrequencyVerdict[];
  nominal_stable: boolean;
  robust_stable: boolean;
  unstable_plant_indices: number[];
  gain_margin_db: number | null;
  phase_margin_deg: number | null;
  all_specs_ok: boolean;
}

export interface LoopSample {
  omega: number;
  phase_deg: number;
  mag_db: number;
  is_design_freq: boolean;
}

export interface ElementJson {
  kind: string;
  params: Record<string, number>;
}

export interface EvaluateResponse {
  revision: number;
  design: ElementJson[];
  controller: { num: number[]; den: number[] };
  loop: LoopSample[];
  report: LoopReport;
}

export interface SimSeries {
  t: number[];
  x_a: number[];
  x_a_ddot: number[];
  x_t: number[];
  delta_a: number[];
  metrics: Record<string, number>;
}

export interface SimulateResponse {
  road: number[];
  dt: number;
  T: number;
  decimate: number;
  open?: SimSeries;
  closed?: SimSeries;
}

export interface UnstableDiagnostic {
  error: string;
  message: string;
}
