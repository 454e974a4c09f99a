/** Wire types of the engine's JSON API (see shared/api_fixtures.json). */

export interface ParseResponse {
  kind: 'statement' | 'question';
  tree: string;
  prob: number;
  term: string;
}

export interface StoreResponse {
  term: string;
  tree: string | null;
  prob: number | null;
}

export interface RemoveResponse {
  removed: boolean;
}

export interface WhBinding {
  term: string;
  source: string;
}

export type QueryResponse =
  | { kind: 'wh'; answers: WhBinding[] }
  | { kind: 'yesno'; truth: 'yes' | 'no' };

export interface KbFact {
  term: string;
  source: string;
}

export interface HealthResponse {
  status: string;
  facts: number;
}
