/** Typed client for the tuner session API. */

import type { ParamErrorBody, ParamValue, SessionState, Stroke } from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: unknown,
    message?: string,
  ) {
    super(message ?? `request failed with status ${status}`);
    this.name = "ApiError";
  }
}

/** A parameter the server refused; carries the offending field. */
export class ParamRejection extends ApiError {
  readonly field: string;
  readonly permissible: string;

  constructor(body: ParamErrorBody) {
    super(422, body, body.detail);
    this.name = "ParamRejection";
    this.field = body.field;
    this.permissible = body.permissible;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class TunerClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  async createSession(): Promise<SessionState> {
    return this.json(await this.send("POST", "/sessions"));
  }

  async getState(id: string): Promise<SessionState> {
    return this.json(await this.send("GET", `/sessions/${id}/state`));
  }

  async patchParams(
    id: string,
    changes: Record<string, ParamValue>,
  ): Promise<SessionState> {
    const r = await this.send("PATCH", `/sessions/${id}/params`, {
      headers: { "content-type": "application/json" },
      body: JSON.stringify(changes),
    });
    return this.json(r);
  }

  async putImage(
    id: string,
    input: "target" | "hint" | "lineart",
    png: Blob | ArrayBuffer,
  ): Promise<SessionState> {
    const r = await this.send("PUT", `/sessions/${id}/${input}`, {
      headers: { "content-type": "image/png" },
      body: png,
    });
    return this.json(r);
  }

  async postStrokes(id: string, strokes: Stroke[]): Promise<SessionState> {
    const r = await this.send("POST", `/sessions/${id}/strokes`, {
      headers: { "content-type": "application/json" },
      body: JSON.stringify(strokes),
    });
    return this.json(r);
  }

  async clearStrokes(id: string): Promise<SessionState> {
    return this.json(await this.send("DELETE", `/sessions/${id}/strokes`));
  }

  /** Stage image URL; the version query defeats stale browser caches. */
  stageUrl(id: string, stage: string, version: number): string {
    return `${this.baseUrl}/sessions/${id}/stages/${stage}.png?v=${version}`;
  }

  private async send(
    method: string,
    path: string,
    init: RequestInit = {},
  ): Promise<Response> {
    const r = await this.fetchFn(`${this.baseUrl}${path}`, { ...init, method });
    if (r.ok) return r;
    let body: unknown = null;
    try {
      body = await r.json();
    } catch {
      body = null;
    }
    if (r.status === 422 && this.isParamError(body)) {
      throw new ParamRejection(body);
    }
    const detail =
      body && typeof body === "object" && "detail" in body
        ? String((body as { detail: unknown }).detail)
        : undefined;
    throw new ApiError(r.status, body, detail);
  }

  private isParamError(body: unknown): body is ParamErrorBody {
    return (
      typeof body === "object" &&
      body !== null &&
      typeof (body as ParamErrorBody).field === "string" &&
      typeof (body as ParamErrorBody).permissible === "string"
    );
  }

  private async json(r: Response): Promise<SessionState> {
    return (await r.json()) as SessionState;
  }
}
