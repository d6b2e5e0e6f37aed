/** Thin typed client over the session service; every mutation in the UI
 * goes through these five calls. */

import type {
  Choice,
  CreateSessionRequest,
  ErrorBody,
  QueryOut,
  RecommendationOut,
  RecommendationPointerOut,
  SessionOut,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly field?: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, init);
  if (!response.ok) {
    let body: ErrorBody | null = null;
    try {
      body = (await response.json()) as ErrorBody;
    } catch {
      body = null;
    }
    throw new ApiError(
      response.status,
      body?.code ?? "http_error",
      body?.message ?? `HTTP ${response.status}`,
      body?.field,
    );
  }
  return (await response.json()) as T;
}

function post<T>(path: string, payload: unknown): Promise<T> {
  return request<T>(path, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(payload),
  });
}

export function createSession(payload: CreateSessionRequest): Promise<SessionOut> {
  return post("/sessions", payload);
}

export function getSession(id: string): Promise<SessionOut> {
  return request(`/sessions/${id}`);
}

export function getQuery(id: string): Promise<QueryOut | RecommendationPointerOut> {
  return request(`/sessions/${id}/query`);
}

export function postAnswer(
  id: string,
  choice: Choice,
  queryIndex: number,
): Promise<SessionOut> {
  return post(`/sessions/${id}/answer`, { choice, query_index: queryIndex });
}

export function getRecommendation(id: string): Promise<RecommendationOut> {
  return request(`/sessions/${id}/recommendation`);
}
