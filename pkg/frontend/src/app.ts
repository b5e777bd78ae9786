/** Browser wiring for the loop-shaping workbench.
 *
 * Boots a session, renders the Nichols chart (bounds + templates + loop),
 * exposes the element editor with debounced server evaluation, and shows
 * verdict badges and time-response previews.  All numbers on screen come
 * from service responses.
 */

import { ShaperApi, ApiError } from "./api.js";
import { deriveBadges } from "./badges.js";
import type { Element, ElementEdit } from "./elements.js";
import { ELEMENT_KINDS, elementsFromJson, elementsToJson, scaleGain } from "./elements.js";
import {
  boundSegments,
  defaultScale,
  frequencyMarkers,
  loopPath,
  templateDots,
} from "./nichols.js";
import {
  acceptResponse,
  applyElementEdit,
  initialState,
  makeDebouncer,
  type UiDesignState,
} from "./state.js";
import { buildPreview, tracePath } from "./timeplot.js";
import type { BoundsPayload, TemplateSet } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const REFERENCE_DESIGN: Element[] = [
  { kind: "gain", params: { k: 3673 } },
  { kind: "real_zero", params: { a: 0.84 } },
  { kind: "real_zero", params: { a: 20.2 } },
  { kind: "real_pole", params: { a: 9.45 } },
  { kind: "real_pole", params: { a: 4.3 } },
  { kind: "complex_pole_pair", params: { re: 309.6, im: 309.7 } },
];

class Workbench {
  private api = new ShaperApi("");
  private sessionId = "";
  private state: UiDesignState = initialState(REFERENCE_DESIGN);
  private bounds: BoundsPayload | null = null;
  private templates: TemplateSet[] = [];
  private showTemplates = true;
  private scale = defaultScale();
  private debouncer = makeDebouncer(() => void this.submit(), 100);

  async boot(): Promise<void> {
    const info = await this.api.createSession({});
    this.sessionId = info.id;
    this.setText("session-info",
      `${info.num_plants} plants, ${info.frequencies.length} design frequencies, ` +
      `w_st=${info.w_st}, w_sd=${info.w_sd}`);
    const [bounds, templates] = await Promise.all([
      this.api.getBounds(this.sessionId),
      this.api.getTemplates(this.sessionId),
    ]);
    this.bounds = bounds;
    this.templates = templates.templates;
    this.renderElements();
    await this.submit();
    this.wireControls();
  }

  private async submit(): Promise<void> {
    try {
      const response = await this.api.evaluateController(
        this.sessionId,
        elementsToJson(this.state.elements),
      );
      this.state = acceptResponse(this.state, response);
      this.setText("error-box", "");
      this.renderChart();
      this.renderBadges();
    } catch (err) {
      if (err instanceof ApiError) {
        this.setText("error-box", `rejected: ${JSON.stringify(err.detail)}`);
      } else {
        this.setText("error-box", String(err));
      }
    }
  }

  private edit(edit: ElementEdit): void {
    const next = applyElementEdit(this.state, edit);
    if (next === this.state) return;
    this.state = next;
    this.renderElements();
    this.debouncer.trigger();
  }

  private renderChart(): void {
    const svg = document.getElementById("nichols") as unknown as SVGSVGElement;
    if (!svg || !this.state.lastResponse) return;
    svg.innerHTML = "";
    const report = this.state.lastResponse.report;
    const badges = deriveBadges(report);
    if (this.bounds) {
      for (const bound of this.bounds.loop_plane.intersection) {
        const violated = badges.violatedFrequencies.includes(bound.omega);
        for (const seg of boundSegments(this.scale, bound)) {
          const line = document.createElementNS(SVG_NS, "line");
          line.setAttribute("x1", String(seg.x));
          line.setAttribute("x2", String(seg.x));
          line.setAttribute("y1", String(seg.yTop));
          line.setAttribute("y2", String(seg.yBottom));
          line.setAttribute("stroke", seg.forbidden ? "#fca" : violated ? "#fd8" : "#cde");
          line.setAttribute("stroke-width", "2");
          svg.appendChild(line);
        }
      }
    }
    if (this.showTemplates) {
      for (const t of this.templates) {
        for (const dot of templateDots(this.scale, t)) {
          const c = document.createElementNS(SVG_NS, "circle");
          c.setAttribute("cx", String(dot.x));
          c.setAttribute("cy", String(dot.y));
          c.setAttribute("r", dot.nominal ? "3" : "1.5");
          c.setAttribute("fill", dot.nominal ? "#d32" : "#9ab");
          svg.appendChild(c);
        }
      }
    }
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", loopPath(this.scale, this.state.lastResponse.loop));
    path.setAttribute("fill", "none");
    path.setAttribute("stroke", "#137");
    path.setAttribute("stroke-width", "2");
    svg.appendChild(path);
    for (const m of frequencyMarkers(
      this.scale,
      this.state.lastResponse.loop,
      badges.violatedFrequencies,
    )) {
      const c = document.createElementNS(SVG_NS, "circle");
      c.setAttribute("cx", String(m.x));
      c.setAttribute("cy", String(m.y));
      c.setAttribute("r", "4");
      c.setAttribute("fill", m.violated ? "#d32" : "#2a6");
      svg.appendChild(c);
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("x", String(m.x + 6));
      label.setAttribute("y", String(m.y - 6));
      label.setAttribute("font-size", "11");
      label.textContent = `${m.omega}`;
      svg.appendChild(label);
    }
  }

  private renderBadges(): void {
    const host = document.getElementById("badges");
    if (!host || !this.state.lastResponse) return;
    const badges = deriveBadges(this.state.lastResponse.report);
    const rows = badges.perFrequency.map(
      (b) =>
        `<tr><td>${b.omega}</td>` +
        `<td class="${b.tracking}">${b.tracking}</td>` +
        `<td class="${b.disturbance}">${b.disturbance}</td>` +
        `<td>${b.worstTracking?.toFixed(4) ?? "-"}</td>` +
        `<td>${b.worstDisturbance?.toFixed(4) ?? "-"}</td></tr>`,
    );
    host.innerHTML =
      `<div>nominal stable: <b>${badges.nominalStable}</b>, ` +
      `robust stable: <b>${badges.robustStable}</b>, ` +
      `all specs: <b class="${badges.allSpecsOk ? "pass" : "fail"}">` +
      `${badges.allSpecsOk ? "pass" : "fail"}</b></div>` +
      `<table><tr><th>w</th><th>tracking</th><th>disturbance</th>` +
      `<th>worst |T|</th><th>worst |Sd|</th></tr>${rows.join("")}</table>`;
  }

  private renderElements(): void {
    const host = document.getElementById("elements");
    if (!host) return;
    host.innerHTML = "";
    this.state.elements.forEach((e, i) => {
      const row = document.createElement("div");
      row.className = "element-row";
      const label = document.createElement("span");
      label.textContent = e.kind;
      row.appendChild(label);
      for (const [name, value] of Object.entries(e.params)) {
        const input = document.createElement("input");
        input.type = "number";
        input.step = "any";
        input.value = String(value);
        input.title = name;
        input.addEventListener("input", () => {
          const v = parseFloat(input.value);
          if (isFinite(v)) {
            this.edit({ op: "set_param", index: i, param: name, value: v });
          }
        });
        row.appendChild(input);
      }
      const remove = document.createElement("button");
      remove.textContent = "x";
      remove.addEventListener("click", () => this.edit({ op: "remove", index: i }));
      row.appendChild(remove);
      host.appendChild(row);
    });
  }

  private wireControls(): void {
    const kindSelect = document.getElementById("add-kind") as HTMLSelectElement;
    for (const kind of ELEMENT_KINDS) {
      const opt = document.createElement("option");
      opt.value = kind;
      opt.textContent = kind;
      kindSelect.appendChild(opt);
    }
    this.on("add-element", () => {
      const kind = kindSelect.value as Element["kind"];
      const defaults: Record<string, Record<string, number>> = {
        gain: { k: 1 },
        real_pole: { a: 1 },
        real_zero: { a: 1 },
        complex_pole_pair: { re: 10, im: 10 },
        complex_zero_pair: { re: 10, im: 10 },
        integrator: { order: 1 },
      };
      this.edit({ op: "add", element: { kind, params: { ...defaults[kind] } } });
    });
    this.on("gain-x2", () => {
      this.state = { ...this.state, elements: scaleGain(this.state.elements, 2), dirty: true };
      this.renderElements();
      this.debouncer.trigger();
    });
    this.on("gain-half", () => {
      this.state = { ...this.state, elements: scaleGain(this.state.elements, 0.5), dirty: true };
      this.renderElements();
      this.debouncer.trigger();
    });
    this.on("toggle-templates", () => {
      this.showTemplates = !this.showTemplates;
      this.renderChart();
    });
    this.on("load-reference", () => {
      this.state = { ...this.state, elements: REFERENCE_DESIGN.map(
        (e) => ({ kind: e.kind, params: { ...e.params } })), dirty: true };
      this.renderElements();
      this.debouncer.trigger();
    });
    this.on("export-design", () => {
      const blob = new Blob(
        [JSON.stringify(elementsToJson(this.state.elements), null, 2)],
        { type: "application/json" });
      const a = document.createElement("a");
      a.href = URL.createObjectURL(blob);
      a.download = "controller.json";
      a.click();
    });
    const importInput = document.getElementById("import-design") as HTMLInputElement;
    importInput?.addEventListener("change", async () => {
      const file = importInput.files?.[0];
      if (!file) return;
      try {
        const doc = JSON.parse(await file.text());
        this.state = { ...this.state, elements: elementsFromJson(doc), dirty: true };
        this.renderElements();
        this.debouncer.trigger();
      } catch (err) {
        this.setText("error-box", `import failed: ${err}`);
      }
    });
    this.on("run-preview", () => void this.preview());
  }

  private async preview(): Promise<void> {
    const select = document.getElementById("scenario") as HTMLSelectElement;
    const quantity = (document.getElementById("quantity") as HTMLSelectElement)
      .value as "x_a" | "x_a_ddot";
    try {
      const sim = await this.api.simulate(this.sessionId, { kind: select.value });
      const preview = buildPreview(sim, quantity);
      const svg = document.getElementById("timeplot") as unknown as SVGSVGElement;
      svg.innerHTML = "";
      const tMax = sim.T;
      const absMax = Math.max(
        ...preview.open.map((p) => Math.abs(p.value)),
        ...preview.closed.map((p) => Math.abs(p.value)),
        1e-12,
      );
      for (const [pts, color] of [
        [preview.open, "#888"],
        [preview.closed, "#137"],
      ] as const) {
        const path = document.createElementNS(SVG_NS, "path");
        path.setAttribute("d", tracePath(pts, 700, 260, tMax, absMax));
        path.setAttribute("fill", "none");
        path.setAttribute("stroke", color);
        path.setAttribute("stroke-width", "1.5");
        svg.appendChild(path);
      }
      this.setText("preview-metrics",
        `open peak ${preview.peakOpen?.toExponential(3)} / ` +
        `closed peak ${preview.peakClosed?.toExponential(3)}`);
    } catch (err) {
      if (err instanceof ApiError) {
        this.setText("preview-metrics",
          `simulation rejected: ${JSON.stringify(err.detail)}`);
      } else {
        this.setText("preview-metrics", String(err));
      }
    }
  }

  private on(id: string, fn: () => void): void {
    document.getElementById(id)?.addEventListener("click", fn);
  }

  private setText(id: string, text: string): void {
    const el = document.getElementById(id);
    if (el) el.textContent = text;
  }
}

if (typeof document !== "undefined" && document.getElementById("nichols")) {
  void new Workbench().boot();
}
