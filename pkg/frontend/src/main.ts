/** Page wiring: session bootstrap, panels, previews, stroke canvas. */

import { TunerClient } from "./api.js";
import {
  applyRefresh,
  renderPanel,
  renderStageSelector,
  showFieldError,
} from "./dom.js";
import { ParamPanel } from "./params.js";
import { PreviewSync } from "./previews.js";
import { StrokeLayer } from "./strokes.js";
import type { SessionState } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

async function readPng(file: File): Promise<ArrayBuffer> {
  return await file.arrayBuffer();
}

export async function boot(baseUrl: string): Promise<void> {
  const client = new TunerClient(baseUrl);
  let state: SessionState = await client.createSession();

  const paramBox = el<HTMLElement>("params");
  const stageBox = el<HTMLElement>("stages");
  const stageView = el<HTMLImageElement>("stage-view");
  const targetView = el<HTMLImageElement>("target-view");
  const finalView = el<HTMLImageElement>("final-view");
  const canvas = el<HTMLCanvasElement>("stroke-canvas");
  const status = el<HTMLElement>("status");

  const sync = new PreviewSync(client, state.stages);
  const images = new Map<string, HTMLImageElement>([["final", finalView]]);

  let selectedStage = "final";
  const selector = renderStageSelector(document, state.stages, (stage) => {
    selectedStage = stage;
    const v = sync.shownVersion(stage);
    if (v !== undefined) stageView.src = client.stageUrl(state.id, stage, v);
  });
  stageBox.appendChild(selector.root);

  const onState = (next: SessionState) => {
    state = next;
    const refreshed = applyRefresh(images, sync, next);
    if (next.versions && refreshed.includes(selectedStage)) {
      stageView.src = client.stageUrl(
        state.id,
        selectedStage,
        next.versions[selectedStage],
      );
    }
    status.textContent = next.versions
      ? `session ${next.id.slice(0, 8)} ready`
      : "upload a target and a hint to begin";
  };

  const panel = new ParamPanel(client, state, {
    onState,
    onFieldError: (field, message) => showFieldError(paramBox, field, message),
    onRequestError: (err) => {
      status.textContent = `request failed: ${String(err)}`;
    },
  });
  renderPanel(document, panel, paramBox);

  const strokes = new StrokeLayer(
    client,
    state.id,
    { width: canvas.width, height: canvas.height },
    onState,
  );
  canvas.addEventListener("pointerdown", (e) =>
    strokes.pointerDown(e.offsetX, e.offsetY),
  );
  canvas.addEventListener("pointermove", (e) => {
    if (strokes.drawing()) strokes.pointerMove(e.offsetX, e.offsetY);
  });
  canvas.addEventListener("pointerup", () => void strokes.pointerUp());
  canvas.addEventListener("pointerleave", () => strokes.pointerCancel());
  el<HTMLButtonElement>("clear-strokes").addEventListener("click", () =>
    void strokes.clear(),
  );
  window.addEventListener("keydown", (e) => {
    if (e.key === "Escape") strokes.pointerCancel();
    if (e.key === "Tab") {
      e.preventDefault();
      selector.cycle();
    }
  });

  const wire = (inputId: string, kind: "target" | "hint" | "lineart") => {
    el<HTMLInputElement>(inputId).addEventListener("change", async (e) => {
      const file = (e.target as HTMLInputElement).files?.[0];
      if (!file) return;
      onState(await client.putImage(state.id, kind, await readPng(file)));
      if (kind === "target") {
        targetView.src = URL.createObjectURL(file);
      }
    });
  };
  wire("pick-target", "target");
  wire("pick-hint", "hint");
  wire("pick-lineart", "lineart");

  onState(state);
}

declare global {
  interface Window {
    tunerBoot?: typeof boot;
  }
}

if (typeof window !== "undefined") {
  window.tunerBoot = boot;
}
