/**
 * Typed client for the synthsearch HTTP API.
 *
 * Wire shapes mirror the server contract exactly; request bodies are built
 * by state.ts so their JSON serialization is testable byte-for-byte.
 */

export interface PageBody {
  offset: number;
  limit: number;
}

export interface SearchBody {
  graph_query?: string;
  slot_query?: Record<string, string>;
  page?: PageBody;
}

export interface AggregateBody extends SearchBody {
  capture: string;
  sample_k?: number;
  seed?: number;
}

export interface CaptureWire {
  span: [number, number];
  text: string;
}

export interface MatchWire {
  doc_id: string;
  sentence_index: number;
  text: string;
  span: [number, number];
  captures: Record<string, CaptureWire>;
}

export interface SearchResponseWire {
  total: number;
  matches: MatchWire[];
  page: { offset: number; limit: number | null };
}

export interface AnswerWire {
  answer: string;
  frequency: number;
}

export interface AggregateResponseWire {
  capture: string;
  distinct: number;
  procedures: number;
  total_matches: number;
  answers: AnswerWire[];
  sample?: string[];
}

export interface SchemaWire {
  node_labels: string[];
  edge_labels: string[];
  slot_names: string[];
  corpus_stats: { procedures: number; sentences: number; terms: number };
}

export interface SentenceWire {
  tokens: string[];
  bio: string[];
  edges: { head: number; tail: number; label: string }[];
}

export interface ProcedureWire {
  id: string;
  source: string;
  patent_id: string;
  sentences: SentenceWire[];
  slots: Record<string, string[]>;
}

export interface ErrorWire {
  code: string;
  message: string;
  position: number | null;
}

/** API error carrying the server's structured envelope. */
export class ApiError extends Error {
  readonly code: string;
  readonly position: number | null;
  readonly status: number;

  constructor(status: number, wire: ErrorWire) {
    super(wire.message);
    this.code = wire.code;
    this.position = wire.position;
    this.status = status;
  }
}

/** Resolve the API base URL: runtime global, then build-time env, then same origin. */
export function apiBase(): string {
  const runtime = (globalThis as { __API_BASE__?: string }).__API_BASE__;
  if (runtime) return runtime.replace(/\/$/, "");
  const buildTime = import.meta.env?.VITE_API_BASE as string | undefined;
  if (buildTime) return buildTime.replace(/\/$/, "");
  return "";
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(apiBase() + path, init);
  if (!response.ok) {
    let wire: ErrorWire;
    try {
      wire = (await response.json()) as ErrorWire;
    } catch {
      wire = { code: "internal", message: response.statusText, position: null };
    }
    throw new ApiError(response.status, wire);
  }
  return (await response.json()) as T;
}

function post<T>(path: string, body: unknown): Promise<T> {
  return request<T>(path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
}

export function searchRequest(body: SearchBody): Promise<SearchResponseWire> {
  return post("/api/search", body);
}

export function aggregateRequest(
  body: AggregateBody,
): Promise<AggregateResponseWire> {
  return post("/api/aggregate", body);
}

export function schemaRequest(): Promise<SchemaWire> {
  return request("/api/schema");
}

export function procedureRequest(docId: string): Promise<ProcedureWire> {
  return request(`/api/procedure/${encodeURIComponent(docId)}`);
}
