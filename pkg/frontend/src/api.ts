// HTTP client for the annotation service. The UI talks to the service
// exclusively through this module; nothing else issues requests.

import {
  AnnotationPayload,
  DetectorInfo,
  ErrorEnvelope,
  Gesture,
  HeatMapResult,
  ModelEntry,
  WadmDoc,
} from "./types";

const API_PREFIX = "/api/v1";

export class ApiError extends Error {
  status: number;
  code: string;
  details: Record<string, unknown>;

  constructor(status: number, code: string, message: string, details: Record<string, unknown>) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.details = details;
  }
}

async function raiseEnvelope(res: Response): Promise<never> {
  let code = "internal";
  let message = `${res.status} ${res.statusText}`;
  let details: Record<string, unknown> = {};
  try {
    const doc = (await res.json()) as ErrorEnvelope;
    code = doc.error.code;
    message = doc.error.message;
    details = doc.error.details ?? {};
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(res.status, code, message, details);
}

export class ApiClient {
  // base is "" when the page is served from (or proxied to) the
  // service origin; tests pass an absolute http://127.0.0.1:port.
  constructor(readonly base: string = "") {}

  private url(path: string, query?: Record<string, string>): string {
    const q = query ? "?" + new URLSearchParams(query).toString() : "";
    return this.base + API_PREFIX + path + q;
  }

  private async json<T>(res: Response): Promise<T> {
    if (!res.ok) await raiseEnvelope(res);
    return (await res.json()) as T;
  }

  async uploadModel(data: Blob | ArrayBuffer | string, name: string): Promise<ModelEntry> {
    const res = await fetch(this.url("/models", { name }), {
      method: "POST",
      body: data,
      headers: { "content-type": "application/octet-stream" },
    });
    return this.json<ModelEntry>(res);
  }

  async listModels(): Promise<ModelEntry[]> {
    return this.json<ModelEntry[]>(await fetch(this.url("/models")));
  }

  async getModel(modelId: string): Promise<ModelEntry> {
    return this.json<ModelEntry>(await fetch(this.url(`/models/${modelId}`)));
  }

  // Raw bytes as uploaded; the format comes back in the download
  // filename ("mesh.obj" or "mesh.ply").
  async meshBytes(modelId: string): Promise<{ data: ArrayBuffer; format: string }> {
    const res = await fetch(this.url(`/models/${modelId}/mesh`));
    if (!res.ok) await raiseEnvelope(res);
    const disp = res.headers.get("content-disposition") ?? "";
    const m = /filename="mesh\.(\w+)"/.exec(disp);
    return { data: await res.arrayBuffer(), format: m ? m[1] : "obj" };
  }

  async select(
    modelId: string,
    gesture: Gesture,
    signal?: AbortSignal,
  ): Promise<number[]> {
    const res = await fetch(this.url(`/models/${modelId}/select/${gesture.mode}`), {
      method: "POST",
      body: JSON.stringify(gesture),
      headers: { "content-type": "application/json" },
      signal,
    });
    const doc = await this.json<{ faces: number[] }>(res);
    return doc.faces;
  }

  async listAnnotations(modelId: string): Promise<WadmDoc[]> {
    return this.json<WadmDoc[]>(await fetch(this.url(`/models/${modelId}/annotations`)));
  }

  async createAnnotation(modelId: string, payload: AnnotationPayload): Promise<WadmDoc> {
    const res = await fetch(this.url(`/models/${modelId}/annotations`), {
      method: "POST",
      body: JSON.stringify(payload),
      headers: { "content-type": "application/json" },
    });
    return this.json<WadmDoc>(res);
  }

  async updateAnnotation(
    modelId: string,
    annId: string,
    payload: AnnotationPayload,
  ): Promise<WadmDoc> {
    const res = await fetch(this.url(`/models/${modelId}/annotations/${annId}`), {
      method: "PUT",
      body: JSON.stringify(payload),
      headers: { "content-type": "application/json" },
    });
    return this.json<WadmDoc>(res);
  }

  async deleteAnnotation(modelId: string, annId: string): Promise<boolean> {
    const res = await fetch(this.url(`/models/${modelId}/annotations/${annId}`), {
      method: "DELETE",
    });
    const doc = await this.json<{ deleted: boolean }>(res);
    return doc.deleted;
  }

  // Canonical export text, byte-stable per model state; kept as text
  // so a download writes exactly what the service produced.
  async exportAnnotations(modelId: string): Promise<string> {
    const res = await fetch(this.url(`/models/${modelId}/annotations/export`));
    if (!res.ok) await raiseEnvelope(res);
    return res.text();
  }

  async listDetectors(): Promise<DetectorInfo[]> {
    return this.json<DetectorInfo[]>(await fetch(this.url("/detectors")));
  }

  async detect(modelId: string, name: string): Promise<HeatMapResult> {
    const res = await fetch(this.url(`/models/${modelId}/detect/${name}`), {
      method: "POST",
    });
    return this.json<HeatMapResult>(res);
  }

  reportUrl(modelId: string): string {
    return this.url(`/models/${modelId}/report`);
  }
}
