import type {
  HealthResponse,
  KbFact,
  ParseResponse,
  QueryResponse,
  RemoveResponse,
  StoreResponse,
} from './types';

/** Non-2xx response; `detail` carries the service's error message. */
export class ApiError extends Error {
  status: number;
  detail: string;

  constructor(status: number, detail: string) {
    super(`API error ${status}: ${detail}`);
    this.name = 'ApiError';
    this.status = status;
    this.detail = detail;
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, {
    headers: { 'Content-Type': 'application/json' },
    ...init,
  });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && typeof body.detail === 'string') detail = body.detail;
    } catch {
      /* non-JSON error body; keep the status text */
    }
    throw new ApiError(response.status, detail);
  }
  return response.json() as Promise<T>;
}

export const api = {
  health: () => request<HealthResponse>('/api/health'),

  parse: (sentence: string) =>
    request<ParseResponse>('/api/parse', {
      method: 'POST',
      body: JSON.stringify({ sentence }),
    }),

  addStatement: (sentence: string) =>
    request<StoreResponse>('/api/statements', {
      method: 'POST',
      body: JSON.stringify({ sentence }),
    }),

  removeStatement: (sentence: string) =>
    request<RemoveResponse>('/api/statements', {
      method: 'DELETE',
      body: JSON.stringify({ sentence }),
    }),

  query: (question: string) =>
    request<QueryResponse>('/api/query', {
      method: 'POST',
      body: JSON.stringify({ question }),
    }),

  listKb: () => request<KbFact[]>('/api/kb'),
};

export type Api = typeof api;
