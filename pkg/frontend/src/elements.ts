/** Controller element model: the editable list the designer manipulates.
 *
 * Serialization matches the backend controller-file format (a JSON list of
 * {kind, params} objects), so designs round-trip between the UI, the
 * service, and files on disk.
 */

import type { ElementJson } from "./types.js";

export const ELEMENT_KINDS = [
  "gain",
  "real_pole",
  "real_zero",
  "complex_pole_pair",
  "complex_zero_pair",
  "integrator",
] as const;

export type ElementKind = (typeof ELEMENT_KINDS)[number];

const PARAM_NAMES: Record<ElementKind, string[]> = {
  gain: ["k"],
  real_pole: ["a"],
  real_zero: ["a"],
  complex_pole_pair: ["re", "im"],
  complex_zero_pair: ["re", "im"],
  integrator: ["order"],
};

export interface Element {
  kind: ElementKind;
  params: Record<string, number>;
}

export function validateElement(e: Element): string | null {
  const names = PARAM_NAMES[e.kind];
  if (!names) return `unknown element kind ${e.kind}`;
  for (const name of names) {
    const v = e.params[name];
    if (typeof v !== "number" || !isFinite(v)) {
      return `${e.kind}.${name} must be a finite number`;
    }
  }
  // corner frequencies must be nonzero; sign is normalized server-side
  if ((e.kind === "real_pole" || e.kind === "real_zero") && e.params.a === 0) {
    return `${e.kind} corner must be nonzero`;
  }
  if (
    (e.kind === "complex_pole_pair" || e.kind === "complex_zero_pair") &&
    e.params.re === 0
  ) {
    return `${e.kind} real part must be nonzero`;
  }
  if (e.kind === "integrator" && (e.params.order < 1 || e.params.order % 1 !== 0)) {
    return "integrator order must be a positive integer";
  }
  return null;
}

export function elementsToJson(elements: Element[]): ElementJson[] {
  return elements.map((e) => ({ kind: e.kind, params: { ...e.params } }));
}

export function elementsFromJson(doc: unknown): Element[] {
  if (!Array.isArray(doc)) {
    throw new Error("controller document must be a JSON list");
  }
  return doc.map((item, i) => {
    const rec = item as ElementJson;
    if (!rec || typeof rec.kind !== "string") {
      throw new Error(`element ${i} has no kind`);
    }
    const e: Element = {
      kind: rec.kind as ElementKind,
      params: { ...(rec.params ?? {}) },
    };
    const problem = validateElement(e);
    if (problem) throw new Error(`element ${i}: ${problem}`);
    return e;
  });
}

export type ElementEdit =
  | { op: "add"; element: Element }
  | { op: "remove"; index: number }
  | { op: "set_param"; index: number; param: string; value: number };

/** Pure list update; returns null (no change) when the edit is invalid. */
export function applyEdit(elements: Element[], edit: ElementEdit): Element[] | null {
  switch (edit.op) {
    case "add": {
      if (validateElement(edit.element)) return null;
      return [...elements, { kind: edit.element.kind, params: { ...edit.element.params } }];
    }
    case "remove": {
      if (edit.index < 0 || edit.index >= elements.length) return null;
      return elements.filter((_, i) => i !== edit.index);
    }
    case "set_param": {
      const target = elements[edit.index];
      if (!target) return null;
      const updated: Element = {
        kind: target.kind,
        params: { ...target.params, [edit.param]: edit.value },
      };
      if (validateElement(updated)) return null;
      return elements.map((e, i) => (i === edit.index ? updated : e));
    }
  }
}

/** Scale the design's total gain; inserts a gain element when none exists. */
export function scaleGain(elements: Element[], factor: number): Element[] {
  const idx = elements.findIndex((e) => e.kind === "gain");
  if (idx < 0) {
    return [{ kind: "gain", params: { k: factor } }, ...elements];
  }
  return elements.map((e, i) =>
    i === idx ? { kind: "gain", params: { k: e.params.k * factor } } : e,
  );
}
