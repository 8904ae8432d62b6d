/** Thin typed client for the session service. */

import { Snapshot, SnapshotError, validateSnapshot } from "./model.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function detailOf(response: Response): Promise<string> {
  try {
    const body = await response.json();
    if (body && typeof body === "object" && "detail" in body) {
      const detail = (body as { detail: unknown }).detail;
      return Array.isArray(detail) ? detail.join("; ") : String(detail);
    }
    return JSON.stringify(body);
  } catch {
    return response.statusText;
  }
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await fetch(this.base + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await detailOf(response));
    }
    return response.json();
  }

  async listSessions(): Promise<Array<{ session_id: string; status: string }>> {
    const body = (await this.request("/sessions")) as {
      sessions: Array<{ session_id: string; status: string }>;
    };
    return body.sessions;
  }

  /** Create a session; an empty config uses the server's default. */
  async createSession(config: Record<string, unknown> = {}): Promise<Snapshot> {
    return validateSnapshot(
      await this.request("/sessions", {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(config),
      }),
    );
  }

  async getSnapshot(sessionId: string): Promise<Snapshot> {
    return validateSnapshot(await this.request(`/sessions/${sessionId}`));
  }

  /** Post a selection (a decimal code string) or null to stop. */
  async postSelection(sessionId: string, code: string | null): Promise<Snapshot> {
    return validateSnapshot(
      await this.request(`/sessions/${sessionId}/selection`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ code }),
      }),
    );
  }
}

export { SnapshotError };
