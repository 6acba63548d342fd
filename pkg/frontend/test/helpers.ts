/** Shared test plumbing: fixture loading and a recorded-response fetch. */

import { readFileSync } from "node:fs";
import { join } from "node:path";

import type { SessionState } from "../src/types.js";

const FIXTURES = join(__dirname, "fixtures");

export function fixtureJson<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8")) as T;
}

export function fixtureBytes(name: string): Buffer {
  return readFileSync(join(FIXTURES, name));
}

export function sessionFixture(): SessionState {
  return fixtureJson<SessionState>("state.json");
}

export interface RecordedCall {
  url: string;
  method: string;
  body?: unknown;
}

export type Responder = (call: RecordedCall) => {
  status: number;
  body: unknown;
};

/** fetch stand-in that logs calls and replays canned JSON responses. */
export function recordedFetch(respond: Responder): {
  fetchFn: (input: string, init?: RequestInit) => Promise<Response>;
  calls: RecordedCall[];
} {
  const calls: RecordedCall[] = [];
  const fetchFn = async (input: string, init?: RequestInit) => {
    const call: RecordedCall = {
      url: input,
      method: init?.method ?? "GET",
      body:
        typeof init?.body === "string" ? JSON.parse(init.body) : init?.body,
    };
    calls.push(call);
    const { status, body } = respond(call);
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  };
  return { fetchFn, calls };
}

export function flushAsync(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
