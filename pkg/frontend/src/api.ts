/** Thin service client. The transport is injectable so tests can run
 * scripted sessions against a fake server and audit the traffic. */

import type {
  MapPayload,
  Point,
  RevealedHold,
  SessionInfo,
  SubmitResult,
  TrialRecordDoc,
} from "./types.js";

export interface Transport {
  (method: "GET" | "POST", path: string, body?: unknown): Promise<unknown>;
}

export function fetchTransport(baseUrl: string): Transport {
  return async (method, path, body) => {
    const response = await fetch(baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw new Error(`${method} ${path} -> ${response.status}: ${await response.text()}`);
    }
    return response.json();
  };
}

export class TaskApi {
  constructor(private readonly transport: Transport) {}

  async createSession(seed?: number): Promise<SessionInfo> {
    const body = seed === undefined ? {} : { seed };
    return (await this.transport("POST", "/sessions", body)) as SessionInfo;
  }

  async getMap(sessionId: string, index: number): Promise<MapPayload> {
    return (await this.transport("GET", `/sessions/${sessionId}/maps/${index}`)) as MapPayload;
  }

  async reveal(sessionId: string, index: number, at: Point): Promise<RevealedHold[]> {
    const body = { index, x: at[0], y: at[1] };
    const result = (await this.transport("POST", `/sessions/${sessionId}/reveal`, body)) as {
      holds: RevealedHold[];
    };
    return result.holds;
  }

  async submitTrial(sessionId: string, record: TrialRecordDoc): Promise<SubmitResult> {
    return (await this.transport("POST", `/sessions/${sessionId}/trials`, record)) as SubmitResult;
  }
}
