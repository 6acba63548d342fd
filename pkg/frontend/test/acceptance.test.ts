// @vitest-environment jsdom
//
// The three behaviors this UI must get right, run against responses and
// stage images recorded from the live session service (test/fixtures).

import { PNG } from "pngjs";
import { describe, expect, it, vi } from "vitest";

import { TunerClient } from "../src/api.js";
import { applyRefresh, renderPanel } from "../src/dom.js";
import { ParamPanel } from "../src/params.js";
import { PreviewSync } from "../src/previews.js";
import { StrokeLayer } from "../src/strokes.js";
import type { SessionState } from "../src/types.js";
import {
  fixtureBytes,
  fixtureJson,
  flushAsync,
  recordedFetch,
  sessionFixture,
} from "./helpers.js";

interface Rooms {
  width: number;
  height: number;
  left_probe: [number, number];
  right_probe: [number, number];
  stroke: { width: number; points: Array<[number, number]> };
}

function pixel(png: PNG, x: number, y: number): [number, number, number] {
  const i = (y * png.width + x) * 4;
  return [png.data[i], png.data[i + 1], png.data[i + 2]];
}

describe("slider bounds come from the service", () => {
  it("renders each control with exactly the served range", () => {
    const state = sessionFixture();
    const { fetchFn } = recordedFetch(() => ({ status: 200, body: state }));
    const panel = new ParamPanel(
      new TunerClient("http://t", fetchFn),
      state,
      { onState: vi.fn() },
    );
    const box = document.createElement("div");
    const inputs = renderPanel(document, panel, box);

    expect(new Set(inputs.keys())).toEqual(new Set(Object.keys(state.bounds)));
    for (const [field, bounds] of Object.entries(state.bounds)) {
      const input = inputs.get(field)!;
      expect(input.min).toBe(String(bounds.min));
      if (bounds.max !== null) {
        expect(input.max).toBe(String(bounds.max));
      } else {
        expect(Number(input.max)).toBeGreaterThanOrEqual(
          bounds.recommended[1],
        );
      }
      expect(input.title).toContain(bounds.permissible);
    }
  });

  it("the ball slider cannot submit a value below its floor", async () => {
    const state = sessionFixture();
    const { fetchFn, calls } = recordedFetch(() => ({
      status: 200,
      body: state,
    }));
    const panel = new ParamPanel(
      new TunerClient("http://t", fetchFn),
      state,
      { onState: vi.fn() },
    );
    const box = document.createElement("div");
    const inputs = renderPanel(document, panel, box);

    const ball = inputs.get("initial_ball")!;
    expect(ball.min).toBe("2");
    ball.value = "1"; // a range input clamps this itself; force the model path
    panel.setValue("initial_ball", 1);
    panel.flushNow();
    await flushAsync();

    expect(calls).toHaveLength(1);
    expect(calls[0].body).toEqual({ initial_ball: 2 });
  });
});

describe("a saturation change refreshes only downstream previews", () => {
  it("re-fetches saturation and later, leaves earlier panes alone", async () => {
    const base = sessionFixture();
    const patched = fixtureJson<SessionState>("patch_saturation.json");
    const { fetchFn, calls } = recordedFetch(() => ({
      status: 200,
      body: patched,
    }));
    const client = new TunerClient("http://t", fetchFn);

    const sync = new PreviewSync(client, base.stages);
    const images = new Map<string, HTMLImageElement>();
    for (const stage of base.stages) {
      images.set(stage, document.createElement("img"));
    }
    applyRefresh(images, sync, base); // everything rendered at v1
    const before = new Map(
      [...images].map(([stage, img]) => [stage, img.src]),
    );

    const refreshed: string[] = [];
    const panel = new ParamPanel(client, base, {
      onState: (state) => refreshed.push(...applyRefresh(images, sync, state)),
    });
    panel.setValue("saturation_delta", 40);
    panel.flushNow();
    await flushAsync();

    expect(calls).toHaveLength(1);
    expect(calls[0].body).toEqual({ saturation_delta: 40 });
    expect(refreshed).toEqual([
      "saturation",
      "quantization",
      "shading",
      "final",
    ]);
    for (const stage of ["lineart", "segmentation", "selection"]) {
      expect(images.get(stage)!.src).toBe(before.get(stage));
    }
    for (const stage of refreshed) {
      expect(images.get(stage)!.src).toContain(`${stage}.png?v=2`);
      expect(images.get(stage)!.src).not.toBe(before.get(stage));
    }
  });
});

describe("a bridging stroke splits the leaking segment", () => {
  const rooms = fixtureJson<Rooms>("rooms.json");

  it("the recorded previews show one segment become two", () => {
    const before = PNG.sync.read(fixtureBytes("seg_before.png"));
    const after = PNG.sync.read(fixtureBytes("seg_after.png"));
    expect(before.width).toBe(rooms.width);
    expect(before.height).toBe(rooms.height);

    const [lx, ly] = rooms.left_probe;
    const [rx, ry] = rooms.right_probe;
    expect(pixel(before, lx, ly)).toEqual(pixel(before, rx, ry));
    expect(pixel(after, lx, ly)).not.toEqual(pixel(after, rx, ry));
  });

  it("drawing the stroke posts it and re-fetches the segmentation pane", async () => {
    const base = sessionFixture();
    const afterStroke = fixtureJson<SessionState>("state_after_stroke.json");
    const { fetchFn, calls } = recordedFetch(() => ({
      status: 200,
      body: afterStroke,
    }));
    const client = new TunerClient("http://t", fetchFn);

    const sync = new PreviewSync(client, base.stages);
    const images = new Map<string, HTMLImageElement>();
    for (const stage of base.stages) {
      images.set(stage, document.createElement("img"));
    }
    applyRefresh(images, sync, base);
    const segBefore = images.get("segmentation")!.src;

    const refreshed: string[] = [];
    const layer = new StrokeLayer(
      client,
      base.id,
      { width: rooms.width, height: rooms.height },
      (state) => refreshed.push(...applyRefresh(images, sync, state)),
      rooms.stroke.width,
    );
    const [[x0, y0], [x1, y1]] = rooms.stroke.points;
    layer.pointerDown(x0, y0);
    layer.pointerMove(x1, y1);
    await layer.pointerUp();

    expect(calls).toHaveLength(1);
    expect(calls[0].body).toEqual([rooms.stroke]);
    expect(refreshed).toContain("segmentation");
    expect(refreshed).not.toContain("lineart");
    const segAfter = images.get("segmentation")!.src;
    expect(segAfter).not.toBe(segBefore);
    expect(segAfter).toContain("segmentation.png?v=2");
  });
});
