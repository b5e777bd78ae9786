/** Thin typed client for the qftlab HTTP API.
 *
 * Every number the UI shows passes through one of these calls; the UI does
 * no control computation of its own.
 */

import type {
  BoundsPayload,
  ElementJson,
  EvaluateResponse,
  SessionInfo,
  SimulateResponse,
  TemplateSet,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; body?: string; headers?: Record<string, string> },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`api error ${status}`);
  }
}

export class ShaperApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = fetch as unknown as FetchLike,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const r = await this.fetchImpl(this.baseUrl + path, {
      method,
      body: body === undefined ? undefined : JSON.stringify(body),
      headers: body === undefined ? undefined : { "content-type": "application/json" },
    });
    const payload = await r.json();
    if (!r.ok) {
      throw new ApiError(r.status, (payload as { detail?: unknown }).detail ?? payload);
    }
    return payload as T;
  }

  createSession(config: Record<string, unknown> = {}): Promise<SessionInfo> {
    return this.request("POST", "/sessions", config);
  }

  getTemplates(sessionId: string): Promise<{ templates: TemplateSet[] }> {
    return this.request("GET", `/sessions/${sessionId}/templates`);
  }

  getBounds(sessionId: string): Promise<BoundsPayload> {
    return this.request("GET", `/sessions/${sessionId}/bounds`);
  }

  evaluateController(sessionId: string, elements: ElementJson[]): Promise<EvaluateResponse> {
    return this.request("PUT", `/sessions/${sessionId}/controller`, elements);
  }

  simulate(
    sessionId: string,
    scenario: { kind: string; params?: Record<string, unknown> },
    options: { T?: number; dt?: number; decimate?: number; loop_mode?: string } = {},
  ): Promise<SimulateResponse> {
    return this.request("POST", `/sessions/${sessionId}/simulate`, {
      scenario,
      ...options,
    });
  }
}
