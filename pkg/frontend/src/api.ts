/** Thin typed client over the session endpoints. All game numbers shown in
 * the UI come from these responses; the client never computes physics. */

import type {
  ActionPayload,
  ActionResponse,
  CreateSessionResponse,
  LayoutResponse,
  ObservationPayload,
  SimulateResponse,
} from "./types.js";

export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.code = code;
    this.status = status;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class GameClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(base = "", fetchImpl: FetchLike = fetch.bind(globalThis)) {
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(this.base + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      const err = payload?.error ?? { code: "unknown", message: "request failed" };
      throw new ApiError(err.code, err.message, response.status);
    }
    return payload as T;
  }

  listCases(): Promise<{ cases: string[] }> {
    return this.request("GET", "/cases");
  }

  listChronics(): Promise<{ chronics: Record<string, string[]> }> {
    return this.request("GET", "/chronics");
  }

  createSession(caseName: string, chronicName: string): Promise<CreateSessionResponse> {
    return this.request("POST", "/sessions", { case: caseName, chronic: chronicName });
  }

  observation(sessionId: string): Promise<{ observation: ObservationPayload | null; done: boolean; remaining_steps: number }> {
    return this.request("GET", `/sessions/${sessionId}/observation`);
  }

  postAction(sessionId: string, action: ActionPayload): Promise<ActionResponse> {
    return this.request("POST", `/sessions/${sessionId}/action`, { action });
  }

  whatIf(sessionId: string, action: ActionPayload): Promise<SimulateResponse> {
    return this.request("POST", `/sessions/${sessionId}/simulate`, { action });
  }

  reset(sessionId: string): Promise<{ observation: ObservationPayload | null; remaining_steps: number }> {
    return this.request("POST", `/sessions/${sessionId}/reset`);
  }

  layout(sessionId: string): Promise<LayoutResponse> {
    return this.request("GET", `/sessions/${sessionId}/layout`);
  }
}
