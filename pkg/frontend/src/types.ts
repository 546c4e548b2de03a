// Wire types for the annotation service. Every endpoint lives under
// /api/v1 and speaks JSON, except the raw mesh download.

export type Vec3 = [number, number, number];
export type Rgb = [number, number, number];

export interface CameraPoseDict {
  eye: Vec3;
  look_dir: Vec3;
  up: Vec3;
  vfov: number;
  aspect: number;
  near: number;
  far: number;
}

export interface LassoGesture {
  camera: CameraPoseDict;
  mode: "lasso";
  polygon: { vertices: [number, number][] };
}

export interface BrushGesture {
  camera: CameraPoseDict;
  mode: "brush";
  stroke: { samples: [number, number][]; radius: number };
}

export type Gesture = LassoGesture | BrushGesture;

export interface ModelEntry {
  model_id: string;
  name: string;
  format: string;
  vertex_count: number;
  face_count: number;
  bbox: { min: number[]; max: number[] };
  texture_ref: string;
  uploaded_at: string;
}

export type FieldKind = "text" | "number" | "date" | "enum";

export interface SchemaEntryDict {
  key: string;
  kind: FieldKind;
  values?: string[];
}

export interface SchemaDict {
  name: string;
  version: number;
  entries: SchemaEntryDict[];
}

// Create/update payload for the annotation endpoints. All keys are
// optional on update; title and faces are required on create.
export interface AnnotationPayload {
  title?: string;
  color?: Rgb;
  faces?: number[];
  description?: string;
  creator?: string;
  fields?: [string, string][];
  schema?: SchemaDict | string;
}

// The service stores and returns annotations as Web Annotation
// documents; the UI only reads the handful of keys below and parses
// the XML body separately (see wadm.ts).
export interface WadmDoc {
  "@context": string;
  id: string;
  type: string;
  created: string;
  modified: string;
  creator: string;
  body: { type: string; format: string; value: string };
  target: {
    source: string;
    selector: { type: string; faces: number[]; vertices: number[] };
  };
}

export interface DetectorInfo {
  name: string;
  url?: string;
  timeout?: number;
}

export interface HeatMapResult {
  detector: string;
  values: number[];
  min: number;
  max: number;
  mean: number;
}

export interface ErrorEnvelope {
  error: {
    code: string;
    message: string;
    details: Record<string, unknown>;
  };
}

export type ToolMode = "navigate" | "brush" | "lasso";

export type OverlayChoice =
  | { kind: "none" }
  | { kind: "annotations" }
  | { kind: "heatmap"; detector: string };
