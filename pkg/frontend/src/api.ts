/** Thin fetch client for the editing service. */

import type {
  EvalPayload,
  ExplanationPayload,
  FitPreviewPayload,
  ReplacementPreviewPayload,
  SessionInfo,
  TermsPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(path, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      if (body && body.detail) detail = String(body.detail);
    } catch {
      // keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export const api = {
  createSession(): Promise<SessionInfo> {
    return request("/sessions", { method: "POST", body: JSON.stringify({}) });
  },

  terms(sessionId: string, which: "base" | "working" = "working"): Promise<TermsPayload> {
    return request(`/sessions/${sessionId}/terms?which=${which}`);
  },

  fitPreview(sessionId: string, body: object): Promise<FitPreviewPayload> {
    return request(`/sessions/${sessionId}/fit-preview`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  },

  replacementPreview(sessionId: string, body: object): Promise<ReplacementPreviewPayload> {
    return request(`/sessions/${sessionId}/replacement-preview`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  },

  applyEdits(
    sessionId: string,
    bundle: { univariate: object[]; interactions: object[] },
  ): Promise<{ model_hash: string; eval: EvalPayload }> {
    return request(`/sessions/${sessionId}/edits`, {
      method: "POST",
      body: JSON.stringify(bundle),
    });
  },

  undo(sessionId: string): Promise<{ model_hash: string; undo_depth: number }> {
    return request(`/sessions/${sessionId}/undo`, { method: "POST" });
  },

  evalReport(sessionId: string): Promise<EvalPayload> {
    return request(`/sessions/${sessionId}/eval`);
  },

  explain(
    sessionId: string,
    siteId: number,
    which: "base" | "working",
  ): Promise<ExplanationPayload> {
    return request(`/sessions/${sessionId}/explain/${siteId}?which=${which}`);
  },
};
