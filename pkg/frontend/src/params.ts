/** Parameter panel model: sliders bounded by the server's ranges. */

import { ParamRejection, TunerClient } from "./api.js";
import { debounce, Debounced } from "./debounce.js";
import type { ParamValue, SessionState } from "./types.js";

export interface SliderSpec {
  field: string;
  min: number;
  /** Finite max for the control; unbounded params get a display cap. */
  max: number;
  /** True when `max` is a display cap rather than a server bound. */
  unbounded: boolean;
  nullable: boolean;
  recommended: [number, number];
  permissible: string;
  value: number | null;
}

/** Display cap for params the server leaves unbounded above. */
function displayCap(min: number, recommended: [number, number]): number {
  return Math.max(min + 1, recommended[1] * 2);
}

/** One slider per tunable the server reports bounds for. */
export function sliderSpecs(state: SessionState): SliderSpec[] {
  return Object.keys(state.bounds).map((field) => {
    const b = state.bounds[field];
    const raw = state.params[field];
    return {
      field,
      min: b.min,
      max: b.max ?? displayCap(b.min, b.recommended),
      unbounded: b.max === null,
      nullable: b.nullable ?? false,
      recommended: b.recommended,
      permissible: b.permissible,
      value: typeof raw === "number" ? raw : null,
    };
  });
}

export interface PanelHooks {
  /** Fresh state after a successful PATCH. */
  onState(state: SessionState): void;
  /** Rejected field and its message; cleared by passing null. */
  onFieldError?(field: string, message: string | null): void;
  /** Transport-level failures (the panel stays usable). */
  onRequestError?(err: unknown): void;
}

/**
 * Collects slider changes, debounces them into a single PATCH, and keeps
 * at most one request in flight; edits made meanwhile queue up client-side.
 */
export class ParamPanel {
  readonly specs: Map<string, SliderSpec>;
  private pending: Record<string, ParamValue> = {};
  private inflight = false;
  private queued = false;
  private readonly push: Debounced<[]>;

  constructor(
    private readonly client: TunerClient,
    private state: SessionState,
    private readonly hooks: PanelHooks,
    debounceMs = 300,
  ) {
    this.specs = new Map(sliderSpecs(state).map((s) => [s.field, s]));
    this.push = debounce(() => void this.submit(), debounceMs);
  }

  /** Clamp into the permissible range and schedule a PATCH. */
  setValue(field: string, value: number | null): void {
    const spec = this.specs.get(field);
    if (!spec) throw new Error(`unknown tunable ${field}`);
    let next: ParamValue;
    if (value === null) {
      if (!spec.nullable) throw new Error(`${field} cannot be disabled`);
      next = null;
    } else {
      next = Math.min(
        Math.max(Math.round(value), spec.min),
        spec.unbounded ? Infinity : spec.max,
      );
    }
    if (next === this.state.params[field] && !(field in this.pending)) return;
    this.pending[field] = next;
    spec.value = typeof next === "number" ? next : null;
    this.push();
  }

  /** Pass a non-slider param through (e.g. enable_shading, seed). */
  setOther(field: string, value: ParamValue): void {
    this.pending[field] = value;
    this.push();
  }

  /** Send now instead of waiting out the debounce interval. */
  flushNow(): void {
    this.push.flush();
  }

  hasPending(): boolean {
    return Object.keys(this.pending).length > 0 || this.inflight;
  }

  private async submit(): Promise<void> {
    if (this.inflight) {
      this.queued = true;
      return;
    }
    const changes = this.pending;
    this.pending = {};
    if (Object.keys(changes).length === 0) return;

    this.inflight = true;
    try {
      const state = await this.client.patchParams(this.state.id, changes);
      this.state = state;
      for (const field of Object.keys(changes)) {
        this.hooks.onFieldError?.(field, null);
      }
      this.hooks.onState(state);
    } catch (err) {
      if (err instanceof ParamRejection) {
        this.hooks.onFieldError?.(err.field, err.message);
        // the whole patch was refused, so every control reverts
        for (const field of Object.keys(changes)) {
          const spec = this.specs.get(field);
          const kept = this.state.params[field];
          if (spec) spec.value = typeof kept === "number" ? kept : null;
        }
      } else {
        this.hooks.onRequestError?.(err);
      }
    } finally {
      this.inflight = false;
      if (this.queued) {
        this.queued = false;
        void this.submit();
      }
    }
  }
}
