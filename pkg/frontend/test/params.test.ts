import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { TunerClient } from "../src/api.js";
import { ParamPanel, sliderSpecs } from "../src/params.js";
import type { ParamErrorBody, SessionState } from "../src/types.js";
import {
  fixtureJson,
  flushAsync,
  recordedFetch,
  sessionFixture,
} from "./helpers.js";

function panelWith(
  respond: Parameters<typeof recordedFetch>[0],
  onState = vi.fn(),
  onFieldError = vi.fn(),
) {
  const { fetchFn, calls } = recordedFetch(respond);
  const client = new TunerClient("http://t", fetchFn);
  const state = sessionFixture();
  const panel = new ParamPanel(client, state, { onState, onFieldError }, 300);
  return { panel, calls, onState, onFieldError };
}

describe("sliderSpecs", () => {
  it("derives one spec per served bound", () => {
    const specs = sliderSpecs(sessionFixture());
    expect(new Set(specs.map((s) => s.field))).toEqual(
      new Set(["blur_radius", "initial_ball", "saturation_delta", "k_colors"]),
    );
  });

  it("keeps the server's finite bounds verbatim", () => {
    const sat = sliderSpecs(sessionFixture()).find(
      (s) => s.field === "saturation_delta",
    )!;
    expect(sat.min).toBe(0);
    expect(sat.max).toBe(254);
    expect(sat.unbounded).toBe(false);
    expect(sat.recommended).toEqual([10, 25]);
  });

  it("marks open-ended params and gives them a finite display cap", () => {
    const ball = sliderSpecs(sessionFixture()).find(
      (s) => s.field === "initial_ball",
    )!;
    expect(ball.min).toBe(2);
    expect(ball.unbounded).toBe(true);
    expect(ball.max).toBeGreaterThanOrEqual(ball.recommended[1]);
  });

  it("carries nullability so the control can offer an off switch", () => {
    const k = sliderSpecs(sessionFixture()).find((s) => s.field === "k_colors")!;
    expect(k.nullable).toBe(true);
    expect(k.value).toBeNull();
  });
});

describe("ParamPanel", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("pools a slider drag into exactly one PATCH", async () => {
    const { panel, calls } = panelWith(() => ({
      status: 200,
      body: sessionFixture(),
    }));
    for (const v of [16, 18, 20, 22, 25]) {
      panel.setValue("saturation_delta", v);
      vi.advanceTimersByTime(100);
    }
    expect(calls).toHaveLength(0);
    vi.advanceTimersByTime(300);
    await flushAsyncWithTimers();
    expect(calls).toHaveLength(1);
    expect(calls[0].body).toEqual({ saturation_delta: 25 });
  });

  it("merges edits to different fields into the same PATCH", async () => {
    const { panel, calls } = panelWith(() => ({
      status: 200,
      body: sessionFixture(),
    }));
    panel.setValue("saturation_delta", 30);
    panel.setValue("initial_ball", 4);
    vi.advanceTimersByTime(300);
    await flushAsyncWithTimers();
    expect(calls).toHaveLength(1);
    expect(calls[0].body).toEqual({ saturation_delta: 30, initial_ball: 4 });
  });

  it("clamps below-minimum slider values so they cannot be submitted", async () => {
    const { panel, calls } = panelWith(() => ({
      status: 200,
      body: sessionFixture(),
    }));
    panel.setValue("initial_ball", 1);
    panel.flushNow();
    await flushAsyncWithTimers();
    expect(calls).toHaveLength(1);
    expect(calls[0].body).toEqual({ initial_ball: 2 });
  });

  it("keeps one request in flight and queues later edits", async () => {
    let release: (() => void) | null = null;
    const gate = new Promise<void>((r) => {
      release = r;
    });
    const calls: unknown[] = [];
    const client = new TunerClient("http://t", async (url, init) => {
      calls.push(JSON.parse(String(init?.body)));
      await gate;
      return new Response(JSON.stringify(sessionFixture()), { status: 200 });
    });
    const panel = new ParamPanel(
      client,
      sessionFixture(),
      { onState: vi.fn() },
      300,
    );

    panel.setValue("saturation_delta", 40);
    panel.flushNow();
    await flushAsyncWithTimers();
    expect(calls).toHaveLength(1);

    panel.setValue("initial_ball", 5);
    panel.flushNow();
    panel.setValue("blur_radius", 2);
    panel.flushNow();
    await flushAsyncWithTimers();
    expect(calls).toHaveLength(1);

    release!();
    await flushAsyncWithTimers();
    expect(calls).toHaveLength(2);
    expect(calls[1]).toEqual({ initial_ball: 5, blur_radius: 2 });
  });

  it("surfaces a 422 on the offending control and reverts it", async () => {
    const err = fixtureJson<ParamErrorBody>("err_ball.json");
    const { panel, calls, onState, onFieldError } = panelWith(() => ({
      status: 422,
      body: err,
    }));
    panel.setOther("initial_ball", 1); // bypasses the client-side clamp
    panel.flushNow();
    await flushAsyncWithTimers();

    expect(calls).toHaveLength(1);
    expect(onState).not.toHaveBeenCalled();
    expect(onFieldError).toHaveBeenCalledWith(
      "initial_ball",
      expect.stringContaining("permissible range is > 1"),
    );
    expect(panel.specs.get("initial_ball")!.value).toBe(3);
  });

  it("clears the inline error once the field patches cleanly", async () => {
    let fail = true;
    const err = fixtureJson<ParamErrorBody>("err_ball.json");
    const { panel, onFieldError } = panelWith(() =>
      fail ? { status: 422, body: err } : { status: 200, body: sessionFixture() },
    );
    panel.setOther("initial_ball", 1);
    panel.flushNow();
    await flushAsyncWithTimers();
    fail = false;
    panel.setValue("initial_ball", 4);
    panel.flushNow();
    await flushAsyncWithTimers();
    expect(onFieldError).toHaveBeenLastCalledWith("initial_ball", null);
  });

  it("does nothing when a value matches the server state", () => {
    const { panel, calls } = panelWith(() => ({
      status: 200,
      body: sessionFixture(),
    }));
    panel.setValue("saturation_delta", 15); // already the session value
    vi.advanceTimersByTime(1000);
    expect(calls).toHaveLength(0);
    expect(panel.hasPending()).toBe(false);
  });
});

/** Drain microtasks while fake timers are active. */
async function flushAsyncWithTimers(): Promise<void> {
  for (let i = 0; i < 20; i++) {
    await Promise.resolve();
  }
}
