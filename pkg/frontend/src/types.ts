/** Wire types mirroring the tuner service JSON payloads. */

export type StageName =
  | "lineart"
  | "segmentation"
  | "selection"
  | "saturation"
  | "quantization"
  | "shading"
  | "final";

export interface ParamBounds {
  /** Human-readable permissible range, e.g. "> 1". */
  permissible: string;
  min: number;
  /** null means unbounded above. */
  max: number | null;
  recommended: [number, number];
  nullable?: boolean;
  note?: string;
}

export interface ImageDims {
  width: number;
  height: number;
}

export interface SessionInputs {
  target: ImageDims | null;
  hint: ImageDims | null;
  lineart: ImageDims | null;
  strokes: number;
}

export type ParamValue = number | boolean | null;

export interface SessionState {
  id: string;
  params: Record<string, ParamValue>;
  inputs: SessionInputs;
  /** Per-stage recompute counters; null until both inputs are uploaded. */
  versions: Record<string, number> | null;
  stages: string[];
  bounds: Record<string, ParamBounds>;
}

/** 422 body for a parameter outside its permissible range. */
export interface ParamErrorBody {
  detail: string;
  field: string;
  permissible: string;
}

export interface Stroke {
  width: number;
  points: Array<[number, number]>;
}
