// Top-left frame: scene-level actions. Load and export move whole
// models and annotation sets; settings, model info, and help open as
// panels below the buttons, one at a time.

import { ModelEntry } from "./types";

export interface SceneCallbacks {
  onLoadFile: (file: File) => void;
  onOpenModel: (modelId: string) => void;
  onExport: () => void;
  onSettings: (settings: { background: string; showEdges: boolean }) => void;
}

const BACKGROUNDS: [string, string][] = [
  ["#1d2129", "Slate"],
  ["#000000", "Black"],
  ["#f2f3f5", "Paper"],
];

const HELP_TEXT = [
  "Load a mesh (OBJ or ASCII PLY) with the file picker, or reopen one already on the service.",
  "Drag in the workspace to orbit; hold Shift (or use the middle button) to pan; scroll to zoom.",
  "Pick the brush or lasso in the tools menu and drag over the model; the service computes which visible faces the gesture covers and the workspace highlights its answer.",
  "Save the highlighted selection as an annotation, with optional structured fields behind a named schema.",
  "Overlays show saved annotations in their display colors, or a detector heat map with the legend's fixed cool-to-hot ramp.",
  "Export writes the model's annotations as a Web Annotation collection; the report link renders a printable summary.",
];

export class SceneMenu {
  readonly el: HTMLElement;
  private panels = new Map<string, HTMLDivElement>();
  private modelSelect: HTMLSelectElement;
  private infoBody: HTMLDivElement;
  private reportLink: HTMLAnchorElement;

  constructor(private callbacks: SceneCallbacks) {
    this.el = document.createElement("nav");
    this.el.className = "scene-menu";
    this.el.setAttribute("aria-label", "Scene menu");

    const heading = document.createElement("h2");
    heading.textContent = "Scene";
    this.el.appendChild(heading);

    const buttons = document.createElement("div");
    buttons.className = "menu-buttons";
    this.el.appendChild(buttons);

    // load -----------------------------------------------------------
    const loadPanel = this.panel("load", "Load");
    const fileLabel = document.createElement("label");
    fileLabel.textContent = "Upload a mesh file";
    const fileInput = document.createElement("input");
    fileInput.type = "file";
    fileInput.className = "load-file";
    fileInput.accept = ".obj,.ply";
    fileInput.addEventListener("change", () => {
      const f = fileInput.files?.[0];
      if (f) this.callbacks.onLoadFile(f);
    });
    fileLabel.appendChild(fileInput);
    loadPanel.appendChild(fileLabel);

    const openLabel = document.createElement("label");
    openLabel.textContent = "Open from the service";
    this.modelSelect = document.createElement("select");
    this.modelSelect.className = "model-select";
    openLabel.appendChild(this.modelSelect);
    loadPanel.appendChild(openLabel);
    const openBtn = document.createElement("button");
    openBtn.type = "button";
    openBtn.className = "open-model";
    openBtn.textContent = "Open";
    openBtn.addEventListener("click", () => {
      if (this.modelSelect.value) this.callbacks.onOpenModel(this.modelSelect.value);
    });
    loadPanel.appendChild(openBtn);

    // export ----------------------------------------------------------
    const exportBtn = document.createElement("button");
    exportBtn.type = "button";
    exportBtn.className = "menu-button export-action";
    exportBtn.textContent = "Export";
    exportBtn.addEventListener("click", () => this.callbacks.onExport());

    // settings --------------------------------------------------------
    const settingsPanel = this.panel("settings", "Settings");
    const bgLabel = document.createElement("label");
    bgLabel.textContent = "Background";
    const bgSelect = document.createElement("select");
    bgSelect.className = "background-select";
    for (const [value, name] of BACKGROUNDS) {
      const opt = document.createElement("option");
      opt.value = value;
      opt.textContent = name;
      bgSelect.appendChild(opt);
    }
    bgLabel.appendChild(bgSelect);
    settingsPanel.appendChild(bgLabel);
    const edgesLabel = document.createElement("label");
    const edgesBox = document.createElement("input");
    edgesBox.type = "checkbox";
    edgesBox.className = "edges-checkbox";
    edgesBox.checked = true;
    edgesLabel.appendChild(edgesBox);
    edgesLabel.appendChild(document.createTextNode(" Show face edges"));
    settingsPanel.appendChild(edgesLabel);
    const emitSettings = () =>
      this.callbacks.onSettings({ background: bgSelect.value, showEdges: edgesBox.checked });
    bgSelect.addEventListener("change", emitSettings);
    edgesBox.addEventListener("change", emitSettings);

    // model info ------------------------------------------------------
    const infoPanel = this.panel("model-info", "Model info");
    this.infoBody = document.createElement("div");
    this.infoBody.className = "model-info-body";
    this.infoBody.textContent = "No model loaded.";
    infoPanel.appendChild(this.infoBody);
    this.reportLink = document.createElement("a");
    this.reportLink.className = "report-link";
    this.reportLink.textContent = "Open report";
    this.reportLink.target = "_blank";
    this.reportLink.hidden = true;
    infoPanel.appendChild(this.reportLink);

    // help ------------------------------------------------------------
    const helpPanel = this.panel("help", "Help");
    const helpList = document.createElement("ul");
    helpList.className = "help-text";
    for (const line of HELP_TEXT) {
      const li = document.createElement("li");
      li.textContent = line;
      helpList.appendChild(li);
    }
    helpPanel.appendChild(helpList);

    // button order fixes the menu layout: Load, Export, Settings,
    // Model info, Help
    buttons.appendChild(this.toggleButton("load", "Load"));
    buttons.appendChild(exportBtn);
    buttons.appendChild(this.toggleButton("settings", "Settings"));
    buttons.appendChild(this.toggleButton("model-info", "Model info"));
    buttons.appendChild(this.toggleButton("help", "Help"));
    for (const p of this.panels.values()) this.el.appendChild(p);
  }

  private panel(id: string, title: string): HTMLDivElement {
    const panel = document.createElement("div");
    panel.className = `menu-panel panel-${id}`;
    panel.hidden = true;
    const h = document.createElement("h3");
    h.textContent = title;
    panel.appendChild(h);
    this.panels.set(id, panel);
    return panel;
  }

  private toggleButton(id: string, label: string): HTMLButtonElement {
    const btn = document.createElement("button");
    btn.type = "button";
    btn.className = `menu-button toggle-${id}`;
    btn.textContent = label;
    btn.addEventListener("click", () => this.togglePanel(id));
    return btn;
  }

  togglePanel(id: string) {
    const target = this.panels.get(id);
    if (!target) return;
    const show = target.hidden;
    for (const p of this.panels.values()) p.hidden = true;
    target.hidden = !show;
  }

  isPanelOpen(id: string): boolean {
    return this.panels.get(id)?.hidden === false;
  }

  setModels(models: ModelEntry[]) {
    this.modelSelect.replaceChildren();
    for (const m of models) {
      const opt = document.createElement("option");
      opt.value = m.model_id;
      opt.textContent = `${m.name || m.model_id.slice(0, 12)} (${m.face_count} faces)`;
      this.modelSelect.appendChild(opt);
    }
  }

  setModelInfo(entry: ModelEntry | null, reportUrl: string | null) {
    if (!entry) {
      this.infoBody.textContent = "No model loaded.";
      this.reportLink.hidden = true;
      return;
    }
    this.infoBody.replaceChildren();
    const rows: [string, string][] = [
      ["Name", entry.name || "(unnamed)"],
      ["Id", entry.model_id],
      ["Format", entry.format.toUpperCase()],
      ["Faces", String(entry.face_count)],
      ["Vertices", String(entry.vertex_count)],
      ["Bounds", `${entry.bbox.min.join(", ")} to ${entry.bbox.max.join(", ")}`],
      ["Uploaded", entry.uploaded_at],
    ];
    const dl = document.createElement("dl");
    for (const [k, v] of rows) {
      const dt = document.createElement("dt");
      dt.textContent = k;
      const dd = document.createElement("dd");
      dd.textContent = v;
      dl.appendChild(dt);
      dl.appendChild(dd);
    }
    this.infoBody.appendChild(dl);
    if (reportUrl) {
      this.reportLink.href = reportUrl;
      this.reportLink.hidden = false;
    }
  }
}
