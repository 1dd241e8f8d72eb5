// Pure view-model helpers: everything here is derived from API responses
// (no client-side ground truth) and unit-testable without a DOM.

import type { ToolResponse, TraceEntry, TurnResponse } from "./api.js";

export interface TimelineStep {
  callId: string;
  tool: string;
  status: "pending" | "ok" | "error" | "skipped";
  error?: string;
}

export interface TurnView {
  turn: number;
  query: string;
  response: string;
  groups: TimelineStep[][]; // serial groups; parallel steps within a group
  detections: Detection[];
  gallery: GalleryItem[];
  artifactHandles: string[]; // image artifacts this turn created (crops etc.)
}

export interface ConsoleViewState {
  sessionId: string | null;
  pending: boolean;
  banner: string | null;
  turns: TurnView[];
  selectedArtifact: string | null;
}

export function initialState(): ConsoleViewState {
  return { sessionId: null, pending: false, banner: null, turns: [], selectedArtifact: null };
}

export interface Detection {
  bbox: [number, number, number, number];
  score: number;
  cropHandle?: string;
}

export interface GalleryItem {
  targetId: string;
  score: number;
  rank: number;
  kind: "fragment" | "glyph" | "text";
  snippet?: string;
}

// Timeline steps in trace array order (which equals plan order), grouped by
// the plan event's serial groups.
export function timelineFromTrace(trace: TraceEntry[]): TimelineStep[][] {
  const planEvent = trace.find((e) => e.event === "plan");
  const statusByCall = new Map<string, { status: TimelineStep["status"]; error?: string }>();
  const orderedCalls: { callId: string; tool: string }[] = [];
  for (const entry of trace) {
    if (entry.event === "tool_call" && entry.call_id && entry.tool) {
      orderedCalls.push({ callId: entry.call_id, tool: entry.tool });
      statusByCall.set(entry.call_id, { status: "pending" });
    }
    if (entry.event === "tool_result" && entry.call_id) {
      statusByCall.set(entry.call_id, {
        status: (entry.status as TimelineStep["status"]) ?? "ok",
        error: entry.error,
      });
    }
  }
  const steps = orderedCalls.map(({ callId, tool }) => ({
    callId,
    tool,
    ...statusByCall.get(callId)!,
  }));
  if (!planEvent?.groups) {
    return steps.map((s) => [s]);
  }
  // slice the flat ordered steps into the plan's group sizes
  const groups: TimelineStep[][] = [];
  let cursor = 0;
  for (const group of planEvent.groups) {
    groups.push(steps.slice(cursor, cursor + group.length));
    cursor += group.length;
  }
  return groups;
}

export function detectionsFromResults(results: Record<string, ToolResponse>): Detection[] {
  const out: Detection[] = [];
  for (const response of Object.values(results)) {
    if (response.status !== "ok") continue;
    const dets = response.data["detections"];
    if (!Array.isArray(dets)) continue;
    for (const det of dets) {
      out.push({
        bbox: det.bbox as [number, number, number, number],
        score: det.score as number,
        cropHandle: det.crop_handle as string | undefined,
      });
    }
  }
  return out;
}

export function galleryFromResults(results: Record<string, ToolResponse>): GalleryItem[] {
  const items: GalleryItem[] = [];
  for (const response of Object.values(results)) {
    if (response.status !== "ok") continue;
    const hits = response.data["hits"];
    if (!Array.isArray(hits)) continue;
    for (const hit of hits) {
      if (typeof hit.target_id === "string") {
        items.push({
          targetId: hit.target_id,
          score: hit.score,
          rank: hit.rank,
          kind: hit.target_id.includes("/") ? "glyph" : "fragment",
        });
      } else if (typeof hit.chunk_id === "string") {
        items.push({
          targetId: hit.chunk_id,
          score: hit.score,
          rank: hit.rank,
          kind: "text",
          snippet: hit.snippet,
        });
      }
    }
  }
  return items.sort((a, b) => a.rank - b.rank || a.targetId.localeCompare(b.targetId));
}

export function turnViewFromResponse(query: string, body: TurnResponse): TurnView {
  return {
    turn: body.turn,
    query,
    response: body.response,
    groups: timelineFromTrace(body.trace),
    detections: detectionsFromResults(body.result.results),
    gallery: galleryFromResults(body.result.results),
    artifactHandles: Object.keys(body.artifacts),
  };
}

// Scale an image-space box to display space for an overlay rectangle.
export function overlayRect(
  bbox: [number, number, number, number],
  natural: { width: number; height: number },
  display: { width: number; height: number },
): { left: number; top: number; width: number; height: number } {
  const sx = display.width / natural.width;
  const sy = display.height / natural.height;
  return {
    left: bbox[0] * sx,
    top: bbox[1] * sy,
    width: (bbox[2] - bbox[0]) * sx,
    height: (bbox[3] - bbox[1]) * sy,
  };
}

export interface ValidationResult {
  ok: boolean;
  fieldErrors: Record<string, string>;
}

// Inline validation before any request is sent: an empty query with neither
// uploads nor a selected artifact never reaches the service.
export function validateTurnInput(
  query: string,
  imageCount: number,
  selectedArtifact: string | null,
): ValidationResult {
  const fieldErrors: Record<string, string> = {};
  if (!query.trim() && imageCount === 0 && !selectedArtifact) {
    fieldErrors["query"] = "Enter a query or attach an image.";
  }
  return { ok: Object.keys(fieldErrors).length === 0, fieldErrors };
}

// Session ids persist in the URL fragment so a refresh keeps the session.
export function sessionIdFromFragment(fragment: string): string | null {
  const match = fragment.match(/session=([0-9a-f]{32})/);
  return match ? match[1] : null;
}

export function fragmentForSession(sessionId: string): string {
  return `#session=${sessionId}`;
}
