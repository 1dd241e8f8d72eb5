// Typed client for the scriptorium HTTP API (docs/wire-protocol.md).
// The console renders only what these endpoints return.

export interface TraceEntry {
  ts: string;
  event: "perceive" | "plan" | "tool_call" | "tool_result" | "respond";
  call_id?: string;
  tool?: string;
  status?: string;
  error?: string;
  groups?: string[][];
  reused?: string[];
  handles?: string[];
  [key: string]: unknown;
}

export interface ToolResponse {
  call_id: string;
  status: "ok" | "error" | "skipped";
  data: Record<string, unknown>;
  error?: string;
}

export interface ArtifactPayload {
  kind: string;
  png_base64: string;
  meta: Record<string, unknown>;
}

export interface TurnResponse {
  request_id: string;
  session_id: string;
  turn: number;
  response: string;
  result: {
    intent: string;
    template: string | null;
    results: Record<string, ToolResponse>;
  };
  trace: TraceEntry[];
  artifacts: Record<string, ArtifactPayload>;
}

export interface CharacterRecord {
  instance_id: string;
  reading_index: number;
  bbox: [number, number, number, number];
  glyph_class: string | null;
  crop_ref: string;
}

export interface FragmentBundle {
  request_id: string;
  fragment_id: string;
  rubbing: { image_ref: string; provenance: string } | null;
  facsimile: { image_ref: string; origin: string } | null;
  characters: CharacterRecord[];
  interpretations: { text: string; source: string }[];
  document_chunks: { doc_id: string; chunk_id: string; text: string }[];
  images: Record<string, string>; // image_ref -> base64 PNG
}

export interface SearchHit {
  chunk_id: string;
  score: number;
  rank: number;
  snippet: string;
  kind: string;
  source_ref: string;
}

export interface ApiError {
  code: string;
  message: string;
  field?: string;
}

export class ServiceError extends Error {
  constructor(public status: number, public detail: ApiError) {
    super(`${detail.code}: ${detail.message}`);
  }
}

async function parse<T>(res: Response): Promise<T> {
  const body = await res.json();
  if (!res.ok || body.error) {
    throw new ServiceError(res.status, body.error ?? { code: "http_error", message: res.statusText });
  }
  return body as T;
}

export class ConsoleApi {
  constructor(public baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}${path}`;
  }

  async health(): Promise<{ status: string; fragments: number }> {
    return parse(await fetch(this.url("/health")));
  }

  async createSession(): Promise<string> {
    const body = await parse<{ session_id: string }>(
      await fetch(this.url("/sessions"), { method: "POST" }),
    );
    return body.session_id;
  }

  async submitTurn(
    sessionId: string,
    query: string,
    images: { png_base64: string; name?: string }[] = [],
    artifactHandles: string[] = [],
  ): Promise<TurnResponse> {
    const res = await fetch(this.url(`/sessions/${sessionId}/turns`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ query, images, artifact_handles: artifactHandles }),
    });
    return parse(res);
  }

  async sessionTrace(sessionId: string): Promise<{ turns: number; trace: TraceEntry[] }> {
    return parse(await fetch(this.url(`/sessions/${sessionId}/trace`)));
  }

  async fragment(fragmentId: string): Promise<FragmentBundle> {
    return parse(await fetch(this.url(`/kb/fragments/${encodeURIComponent(fragmentId)}`)));
  }

  async search(query: string, k = 5): Promise<SearchHit[]> {
    const params = new URLSearchParams({ q: query, k: String(k) });
    const body = await parse<{ hits: SearchHit[] }>(
      await fetch(this.url(`/kb/search?${params}`)),
    );
    return body.hits;
  }
}
