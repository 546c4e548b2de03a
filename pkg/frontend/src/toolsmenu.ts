// Top-right frame: the annotation list, the tool mode switch, and
// tool settings including the overlay picker with its heat-map
// legend. Editing opens the annotation form at the bottom.

import { AnnotationForm, FormCallbacks, FormResult } from "./form";
import { rampGradientCss } from "./ramp";
import { DetectorInfo, OverlayChoice, ToolMode } from "./types";
import { ViewState } from "./viewstate";
import { AnnotationView } from "./wadm";

export interface ToolsCallbacks {
  onSaveAnnotation: (result: FormResult, form: AnnotationForm) => void;
  onDeleteAnnotation: (annId: string) => void;
  onOverlayChange: (overlay: OverlayChoice) => void;
  currentSelection: () => number[];
}

const MODES: [ToolMode, string][] = [
  ["navigate", "Navigate"],
  ["brush", "Brush"],
  ["lasso", "Lasso"],
];

export class ToolsMenu {
  readonly el: HTMLElement;
  private listEl: HTMLUListElement;
  private formHost: HTMLDivElement;
  private overlaySelect: HTMLSelectElement;
  private legend: HTMLDivElement;
  private radiusInput: HTMLInputElement;
  private openForm: AnnotationForm | null = null;

  constructor(private state: ViewState, private callbacks: ToolsCallbacks) {
    this.el = document.createElement("nav");
    this.el.className = "tools-menu";
    this.el.setAttribute("aria-label", "Tools menu");

    const heading = document.createElement("h2");
    heading.textContent = "Tools";
    this.el.appendChild(heading);

    // mode selection --------------------------------------------------
    const modeBox = document.createElement("fieldset");
    modeBox.className = "mode-select";
    const modeLegend = document.createElement("legend");
    modeLegend.textContent = "Mode";
    modeBox.appendChild(modeLegend);
    for (const [mode, label] of MODES) {
      const wrap = document.createElement("label");
      const radio = document.createElement("input");
      radio.type = "radio";
      radio.name = "tool-mode";
      radio.value = mode;
      radio.checked = state.mode === mode;
      radio.addEventListener("change", () => {
        if (radio.checked) this.state.mode = mode;
      });
      wrap.appendChild(radio);
      wrap.appendChild(document.createTextNode(" " + label));
      modeBox.appendChild(wrap);
    }
    this.el.appendChild(modeBox);

    // tool settings ---------------------------------------------------
    const settings = document.createElement("div");
    settings.className = "tool-settings";
    const settingsHead = document.createElement("h3");
    settingsHead.textContent = "Tool settings";
    settings.appendChild(settingsHead);

    const radiusLabel = document.createElement("label");
    radiusLabel.textContent = "Brush radius (px)";
    this.radiusInput = document.createElement("input");
    this.radiusInput.type = "number";
    this.radiusInput.className = "brush-radius";
    this.radiusInput.min = "1";
    this.radiusInput.max = "200";
    this.radiusInput.value = String(state.brushRadiusPx);
    this.radiusInput.addEventListener("change", () => {
      const r = Number(this.radiusInput.value);
      if (r > 0) {
        this.state.brushRadiusPx = r;
      } else {
        this.radiusInput.value = String(this.state.brushRadiusPx);
      }
    });
    radiusLabel.appendChild(this.radiusInput);
    settings.appendChild(radiusLabel);

    const overlayLabel = document.createElement("label");
    overlayLabel.textContent = "Overlay";
    this.overlaySelect = document.createElement("select");
    this.overlaySelect.className = "overlay-select";
    overlayLabel.appendChild(this.overlaySelect);
    settings.appendChild(overlayLabel);
    this.overlaySelect.addEventListener("change", () => {
      const v = this.overlaySelect.value;
      const overlay: OverlayChoice =
        v === "none"
          ? { kind: "none" }
          : v === "annotations"
            ? { kind: "annotations" }
            : { kind: "heatmap", detector: v.slice("heatmap:".length) };
      this.legend.hidden = overlay.kind !== "heatmap";
      this.callbacks.onOverlayChange(overlay);
    });
    this.setDetectors([]);

    // legend for the fixed cool-to-hot ramp; hidden unless a heat map
    // is the active overlay
    this.legend = document.createElement("div");
    this.legend.className = "heat-legend";
    this.legend.hidden = true;
    const bar = document.createElement("div");
    bar.className = "heat-legend-bar";
    bar.style.background = rampGradientCss();
    this.legend.appendChild(bar);
    const marks = document.createElement("div");
    marks.className = "heat-legend-marks";
    for (const t of ["0 (cool)", "0.5", "1 (hot)"]) {
      const s = document.createElement("span");
      s.textContent = t;
      marks.appendChild(s);
    }
    this.legend.appendChild(marks);
    settings.appendChild(this.legend);
    this.el.appendChild(settings);

    // annotation list -------------------------------------------------
    const listHead = document.createElement("h3");
    listHead.textContent = "Annotations";
    this.el.appendChild(listHead);
    this.listEl = document.createElement("ul");
    this.listEl.className = "annotation-list";
    this.el.appendChild(this.listEl);

    const newBtn = document.createElement("button");
    newBtn.type = "button";
    newBtn.className = "new-annotation";
    newBtn.textContent = "Annotate selection";
    newBtn.addEventListener("click", () => this.editAnnotation(null));
    this.el.appendChild(newBtn);

    this.formHost = document.createElement("div");
    this.formHost.className = "form-host";
    this.el.appendChild(this.formHost);
  }

  setDetectors(detectors: DetectorInfo[]) {
    const current = this.overlaySelect.value;
    this.overlaySelect.replaceChildren();
    const choices: [string, string][] = [
      ["none", "None"],
      ["annotations", "Annotations"],
    ];
    for (const d of detectors) {
      choices.push([`heatmap:${d.name}`, `Heat map: ${d.name}`]);
    }
    for (const [value, label] of choices) {
      const opt = document.createElement("option");
      opt.value = value;
      opt.textContent = label;
      this.overlaySelect.appendChild(opt);
    }
    this.overlaySelect.value = choices.some(([v]) => v === current) ? current : "annotations";
  }

  setAnnotations(annotations: AnnotationView[]) {
    this.listEl.replaceChildren();
    for (const ann of annotations) {
      const li = document.createElement("li");
      li.className = "annotation-item";
      li.dataset.annId = ann.id;

      const swatch = document.createElement("span");
      swatch.className = "annotation-swatch";
      swatch.style.background = `rgb(${ann.color[0]}, ${ann.color[1]}, ${ann.color[2]})`;
      li.appendChild(swatch);

      const label = document.createElement("button");
      label.type = "button";
      label.className = "annotation-title";
      label.textContent = `${ann.title} (${ann.faces.length} faces)`;
      label.addEventListener("click", () => this.editAnnotation(ann));
      li.appendChild(label);

      const del = document.createElement("button");
      del.type = "button";
      del.className = "annotation-delete";
      del.setAttribute("aria-label", `Delete ${ann.title}`);
      del.textContent = "×";
      del.addEventListener("click", () => this.callbacks.onDeleteAnnotation(ann.id));
      li.appendChild(del);

      this.listEl.appendChild(li);
    }
  }

  editAnnotation(ann: AnnotationView | null) {
    const formCallbacks: FormCallbacks = {
      onSave: (result: FormResult) => this.callbacks.onSaveAnnotation(result, this.openForm!),
      onCancel: () => this.closeForm(),
      currentSelection: this.callbacks.currentSelection,
    };
    this.openForm = new AnnotationForm(formCallbacks, ann);
    this.formHost.replaceChildren(this.openForm.el);
  }

  closeForm() {
    this.openForm = null;
    this.formHost.replaceChildren();
  }

  currentForm(): AnnotationForm | null {
    return this.openForm;
  }
}
