/** Freehand gap-closing strokes drawn over the line-art preview. */

import type { TunerClient } from "./api.js";
import type { SessionState, Stroke } from "./types.js";

export interface CanvasSize {
  width: number;
  height: number;
}

/** Accumulates one polyline between pointer-down and release. */
export class StrokeBuilder {
  private points: Array<[number, number]> = [];

  constructor(
    readonly width: number,
    private readonly canvas: CanvasSize,
  ) {
    if (width < 1) throw new Error("stroke width must be at least 1");
  }

  /** Add a pointer sample, clipped into the image rectangle. */
  add(x: number, y: number): void {
    const cx = Math.min(Math.max(Math.round(x), 0), this.canvas.width - 1);
    const cy = Math.min(Math.max(Math.round(y), 0), this.canvas.height - 1);
    const last = this.points[this.points.length - 1];
    if (last && last[0] === cx && last[1] === cy) return;
    this.points.push([cx, cy]);
  }

  /** Drop everything drawn so far. */
  cancel(): void {
    this.points = [];
  }

  /**
   * The finished stroke, or null for a zero-length click (a single
   * distinct point paints nothing worth sending).
   */
  finish(): Stroke | null {
    const pts = this.points;
    this.points = [];
    if (pts.length < 2) return null;
    return { width: this.width, points: pts };
  }
}

/**
 * Client-side stroke list synced to the server: strokes post on pointer
 * release, cancelled gestures never produce a request.
 */
export class StrokeLayer {
  strokes: Stroke[] = [];
  private builder: StrokeBuilder | null = null;

  constructor(
    private readonly client: TunerClient,
    private readonly sessionId: string,
    private readonly canvas: CanvasSize,
    private readonly onState: (state: SessionState) => void,
    public brushWidth = 2,
  ) {}

  pointerDown(x: number, y: number): void {
    this.builder = new StrokeBuilder(this.brushWidth, this.canvas);
    this.builder.add(x, y);
  }

  pointerMove(x: number, y: number): void {
    this.builder?.add(x, y);
  }

  /** Abort the in-progress gesture; no request is sent. */
  pointerCancel(): void {
    this.builder?.cancel();
    this.builder = null;
  }

  /** Finish the gesture; posts the stroke unless it was a bare click. */
  async pointerUp(): Promise<void> {
    const stroke = this.builder?.finish() ?? null;
    this.builder = null;
    if (stroke === null) return;
    this.strokes.push(stroke);
    // the server appends, so only the new stroke goes over the wire
    this.onState(await this.client.postStrokes(this.sessionId, [stroke]));
  }

  /** Remove every stroke, server side included. */
  async clear(): Promise<void> {
    this.builder = null;
    if (this.strokes.length === 0) return;
    this.strokes = [];
    this.onState(await this.client.clearStrokes(this.sessionId));
  }

  drawing(): boolean {
    return this.builder !== null;
  }
}
