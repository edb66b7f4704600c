/** Thin typed client for the rent service; every call round-trips JSON. */

import type {
  EditOp,
  EnvyDoc,
  InstanceDoc,
  InstanceResponse,
  LedgerDoc,
  Notion,
  Objective,
  SolutionDoc,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`service error ${status}: ${detail}`);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  const text = await response.text();
  let payload: unknown = null;
  try {
    payload = text ? JSON.parse(text) : null;
  } catch {
    payload = null;
  }
  if (!response.ok) {
    const detail =
      payload && typeof payload === "object" && "detail" in payload
        ? String((payload as { detail: unknown }).detail)
        : text;
    throw new ServiceError(response.status, detail);
  }
  return payload as T;
}

export class RentServiceClient {
  constructor(private readonly baseUrl: string) {}

  createSession(instance?: InstanceDoc): Promise<{ id: string; version: number }> {
    return request(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: JSON.stringify(instance ? { instance } : {}),
    });
  }

  getInstance(sessionId: string): Promise<InstanceResponse> {
    return request(`${this.baseUrl}/sessions/${sessionId}/instance`);
  }

  putInstance(sessionId: string, instance: InstanceDoc, version?: number): Promise<InstanceResponse> {
    return request(`${this.baseUrl}/sessions/${sessionId}/instance`, {
      method: "PUT",
      body: JSON.stringify(version === undefined ? { instance } : { instance, version }),
    });
  }

  applyEdits(sessionId: string, edits: EditOp[], version?: number): Promise<InstanceResponse> {
    return request(`${this.baseUrl}/sessions/${sessionId}/instance`, {
      method: "PUT",
      body: JSON.stringify(version === undefined ? { edits } : { edits, version }),
    });
  }

  solve(sessionId: string, notion: Notion, objective: Objective): Promise<SolutionDoc> {
    return request(`${this.baseUrl}/sessions/${sessionId}/solve`, {
      method: "POST",
      body: JSON.stringify({ notion, objective }),
    });
  }

  whatIf(
    sessionId: string,
    edits: EditOp[],
    notion: Notion,
    objective: Objective,
  ): Promise<SolutionDoc> {
    return request(`${this.baseUrl}/sessions/${sessionId}/whatif`, {
      method: "POST",
      body: JSON.stringify({ edits, notion, objective }),
    });
  }

  ledger(sessionId: string): Promise<LedgerDoc> {
    return request(`${this.baseUrl}/sessions/${sessionId}/ledger`);
  }

  envy(sessionId: string): Promise<EnvyDoc> {
    return request(`${this.baseUrl}/sessions/${sessionId}/envy`);
  }
}
