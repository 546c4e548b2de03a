// Application shell: builds the three frames, owns the view state,
// and routes everything through the service client. Selection
// semantics live entirely on the service; this file only moves face
// lists between the wire and the workspace.

import { ApiClient, ApiError } from "./api";
import { BannerArea } from "./banners";
import { AnnotationForm, FormResult } from "./form";
import { parseModel, RenderMesh } from "./objparse";
import { SceneMenu } from "./scenemenu";
import { SelectionController } from "./selection";
import { ToolsMenu } from "./toolsmenu";
import { Gesture, ModelEntry, OverlayChoice } from "./types";
import { ViewState } from "./viewstate";
import { AnnotationView, parseWadm } from "./wadm";
import { Workspace } from "./workspace";

export interface Frames {
  banners: BannerArea;
  scene: SceneMenu;
  tools: ToolsMenu;
  workspace: Workspace;
}

export class App {
  readonly state = new ViewState();
  readonly banners: BannerArea;
  readonly scene: SceneMenu;
  readonly tools: ToolsMenu;
  readonly workspace: Workspace;
  readonly selection: SelectionController;

  private entry: ModelEntry | null = null;
  private annotations: AnnotationView[] = [];

  constructor(readonly api: ApiClient, root: HTMLElement) {
    this.banners = new BannerArea();
    this.scene = new SceneMenu({
      onLoadFile: (file) => void this.loadFile(file),
      onOpenModel: (id) => void this.openModel(id),
      onExport: () => void this.exportAnnotations(),
      onSettings: (s) => {
        this.workspace.background = s.background;
        this.workspace.showEdges = s.showEdges;
        this.workspace.draw();
      },
    });
    this.workspace = new Workspace(this.state, {
      onGesture: (gesture) => this.submitGesture(gesture),
    });
    this.tools = new ToolsMenu(this.state, {
      onSaveAnnotation: (result, form) => void this.saveAnnotation(result, form),
      onDeleteAnnotation: (id) => void this.deleteAnnotation(id),
      onOverlayChange: (overlay) => void this.setOverlay(overlay),
      currentSelection: () => this.workspace.highlightedFaces(),
    });
    this.selection = new SelectionController(this.api, {
      onPending: (pending) => this.workspace.setPending(pending),
      onResult: (faces) => {
        const form = this.tools.currentForm();
        this.workspace.setLiveSelection(faces, form?.displayColor());
      },
      onError: (err, retry) => this.selectionFailed(err, retry),
    });

    // Frame layout: scene menu top-left, tools menu top-right, the
    // workspace fills the middle; banners overlay the top edge.
    const grid = document.createElement("div");
    grid.className = "app-grid";
    grid.appendChild(this.scene.el);
    grid.appendChild(this.workspace.el);
    grid.appendChild(this.tools.el);
    root.appendChild(this.banners.el);
    root.appendChild(grid);

    this.state.onChange(() => this.workspace.draw());
    window.addEventListener("resize", () => this.fitWorkspace());
    this.fitWorkspace();
  }

  // Sizes the canvas to whatever the grid gives the middle frame;
  // headless DOMs report zero, keeping the default size.
  fitWorkspace() {
    const w = this.workspace.el.clientWidth;
    const h = this.workspace.el.clientHeight;
    if (w > 0 && h > 0) this.workspace.resize(w, h);
  }

  // Populates the scene and tools menus from the service; call once
  // after construction.
  async bootstrap() {
    try {
      this.scene.setModels(await this.api.listModels());
      this.tools.setDetectors(await this.api.listDetectors());
    } catch (err) {
      this.banners.show(`Cannot reach the annotation service: ${message(err)}`, () =>
        void this.bootstrap(),
      );
    }
  }

  async loadFile(file: File): Promise<void> {
    try {
      const data = await readFileBytes(file);
      const entry = await this.api.uploadModel(data, file.name);
      this.useModel(entry, parseModel(data, entry.format));
      this.scene.setModels(await this.api.listModels());
      await this.refreshAnnotations();
    } catch (err) {
      this.banners.show(`Loading ${file.name} failed: ${message(err)}`, () =>
        void this.loadFile(file),
      );
    }
  }

  async openModel(modelId: string): Promise<void> {
    try {
      const entry = await this.api.getModel(modelId);
      const { data, format } = await this.api.meshBytes(modelId);
      this.useModel(entry, parseModel(data, format));
      await this.refreshAnnotations();
    } catch (err) {
      this.banners.show(`Opening the model failed: ${message(err)}`, () =>
        void this.openModel(modelId),
      );
    }
  }

  private useModel(entry: ModelEntry, mesh: RenderMesh) {
    this.entry = entry;
    this.state.modelId = entry.model_id;
    this.annotations = [];
    this.workspace.setMesh(mesh);
    this.scene.setModelInfo(entry, this.api.reportUrl(entry.model_id));
    this.tools.closeForm();
  }

  modelEntry(): ModelEntry | null {
    return this.entry;
  }

  async refreshAnnotations(): Promise<void> {
    if (!this.state.modelId) return;
    const docs = await this.api.listAnnotations(this.state.modelId);
    this.annotations = docs.map(parseWadm);
    this.tools.setAnnotations(this.annotations);
    this.workspace.setAnnotations(this.annotations);
  }

  submitGesture(gesture: Gesture): number | null {
    if (!this.state.modelId) return null;
    return this.selection.submit(this.state.modelId, gesture);
  }

  private selectionFailed(err: Error, retry: () => void) {
    if (err instanceof ApiError && err.status === 404) {
      // the model is gone from the store; retrying the gesture cannot
      // help, reloading the scene can
      this.banners.show(`Selection failed: ${err.message}. Reload the model to continue.`, () =>
        void this.bootstrap(),
      );
      return;
    }
    this.banners.show(`Selection failed: ${message(err)}`, retry);
  }

  async saveAnnotation(result: FormResult, form: AnnotationForm): Promise<void> {
    if (!this.state.modelId) return;
    try {
      if (result.isEdit && result.annId) {
        await this.api.updateAnnotation(this.state.modelId, result.annId, result.payload);
      } else {
        await this.api.createAnnotation(this.state.modelId, result.payload);
      }
      this.tools.closeForm();
      await this.refreshAnnotations();
    } catch (err) {
      if (err instanceof ApiError && err.code === "schema_violation") {
        const keys = (err.details.keys as string[] | undefined) ?? [];
        form.applyServerViolations(keys);
        return;
      }
      this.banners.show(`Saving the annotation failed: ${message(err)}`);
    }
  }

  async deleteAnnotation(annId: string): Promise<void> {
    if (!this.state.modelId) return;
    try {
      await this.api.deleteAnnotation(this.state.modelId, annId);
      await this.refreshAnnotations();
    } catch (err) {
      this.banners.show(`Deleting the annotation failed: ${message(err)}`);
    }
  }

  async setOverlay(overlay: OverlayChoice): Promise<void> {
    this.state.overlay = overlay;
    if (overlay.kind !== "heatmap") {
      this.workspace.setHeat(null);
      this.workspace.draw();
      return;
    }
    if (!this.state.modelId) return;
    try {
      const hm = await this.api.detect(this.state.modelId, overlay.detector);
      // normalize for the ramp; a constant map renders uniformly cool
      const span = hm.max - hm.min;
      const values = hm.values.map((v) => (span > 0 ? (v - hm.min) / span : 0));
      this.workspace.setHeat(values);
    } catch (err) {
      this.banners.show(`Heat map ${overlay.detector} failed: ${message(err)}`, () =>
        void this.setOverlay(overlay),
      );
    }
  }

  async exportAnnotations(): Promise<void> {
    if (!this.state.modelId) {
      this.banners.show("Load a model before exporting.");
      return;
    }
    try {
      const text = await this.api.exportAnnotations(this.state.modelId);
      download(`${(this.entry?.name || "annotations").replace(/\.\w+$/, "")}.json`, text);
    } catch (err) {
      this.banners.show(`Export failed: ${message(err)}`);
    }
  }
}

function message(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}

// FileReader instead of Blob.arrayBuffer: the latter is missing from
// some DOM implementations, the reader works everywhere
function readFileBytes(file: File): Promise<ArrayBuffer> {
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onload = () => resolve(reader.result as ArrayBuffer);
    reader.onerror = () => reject(reader.error ?? new Error(`reading ${file.name} failed`));
    reader.readAsArrayBuffer(file);
  });
}

function download(filename: string, text: string) {
  // headless DOMs lack object URLs; the export itself already
  // happened, so failing to pop a save dialog is not an error
  if (typeof URL.createObjectURL !== "function") return;
  const url = URL.createObjectURL(new Blob([text], { type: "application/json" }));
  const a = document.createElement("a");
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}

export function createApp(root: HTMLElement, apiBase = ""): App {
  const app = new App(new ApiClient(apiBase), root);
  void app.bootstrap();
  return app;
}
