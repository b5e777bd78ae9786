/** Design-session state with optimistic edits and revision reconciliation.
 *
 * Edits update the local element list immediately and mark it dirty; server
 * evaluations arrive asynchronously and are accepted only when their
 * revision is newer than the last acknowledged one, so stale responses from
 * out-of-order requests never repaint the chart.
 */

import type { Element, ElementEdit } from "./elements.js";
import { applyEdit } from "./elements.js";
import type { EvaluateResponse } from "./types.js";

export interface UiDesignState {
  elements: Element[];
  lastResponse: EvaluateResponse | null;
  acknowledgedRevision: number;
  dirty: boolean;
}

export function initialState(elements: Element[] = []): UiDesignState {
  return {
    elements,
    lastResponse: null,
    acknowledgedRevision: 0,
    dirty: elements.length > 0,
  };
}

/** Optimistic local update; returns the unchanged state for invalid edits. */
export function applyElementEdit(state: UiDesignState, edit: ElementEdit): UiDesignState {
  const updated = applyEdit(state.elements, edit);
  if (updated === null) return state;
  return { ...state, elements: updated, dirty: true };
}

/** Fold in a server evaluation; stale revisions are dropped. */
export function acceptResponse(
  state: UiDesignState,
  response: EvaluateResponse,
): UiDesignState {
  if (response.revision <= state.acknowledgedRevision) {
    return state; // stale: a newer evaluation already landed
  }
  return {
    ...state,
    lastResponse: response,
    acknowledgedRevision: response.revision,
    dirty: false,
  };
}

/** Trailing-edge debouncer for element edits (~100 ms before submission). */
export function makeDebouncer(
  submit: () => void,
  delayMs = 100,
  timers: {
    set: (fn: () => void, ms: number) => unknown;
    clear: (handle: unknown) => void;
  } = { set: setTimeout, clear: clearTimeout as (h: unknown) => void },
): { trigger: () => void; cancel: () => void } {
  let handle: unknown = null;
  return {
    trigger() {
      if (handle !== null) timers.clear(handle);
      handle = timers.set(() => {
        handle = null;
        submit();
      }, delayMs);
    },
    cancel() {
      if (handle !== null) timers.clear(handle);
      handle = null;
    },
  };
}
