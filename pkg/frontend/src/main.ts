// Console bootstrap: session lifecycle, turn submission, KB browsing.
// One in-flight turn per session view; submissions stay disabled while a
// turn is pending, mirroring the service's per-session serialization.

import { ConsoleApi, ServiceError } from "./api.js";
import {
  ConsoleViewState,
  fragmentForSession,
  initialState,
  sessionIdFromFragment,
  turnViewFromResponse,
  validateTurnInput,
} from "./model.js";
import {
  renderBanner,
  renderEmptyState,
  renderFragmentBundle,
  renderTurn,
} from "./render.js";

const serviceUrl =
  (window as { SCRIPTORIUM_SERVICE_URL?: string }).SCRIPTORIUM_SERVICE_URL ??
  localStorage.getItem("scriptorium.serviceUrl") ??
  "http://127.0.0.1:8000";

const api = new ConsoleApi(serviceUrl);
const state: ConsoleViewState = initialState();
const uploadsByTurn = new Map<number, string[]>();
const thumbs = new Map<string, string>();

function $(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function setBanner(message: string | null, retry?: () => void) {
  state.banner = message;
  const host = $("banner-host");
  host.replaceChildren();
  if (message) host.appendChild(renderBanner(message, retry));
}

function setPending(pending: boolean) {
  state.pending = pending;
  ($("submit") as HTMLButtonElement).disabled = pending || !state.sessionId;
}

async function startSession() {
  const fromFragment = sessionIdFromFragment(window.location.hash);
  try {
    if (fromFragment) {
      state.sessionId = fromFragment; // refresh keeps the session
    } else {
      state.sessionId = await api.createSession();
      window.location.hash = fragmentForSession(state.sessionId);
    }
    $("session-id").textContent = state.sessionId;
    setBanner(null);
  } catch (err) {
    setBanner(`service unreachable at ${serviceUrl}`, () => void startSession());
  }
  setPending(false);
}

function selectArtifact(handle: string) {
  state.selectedArtifact = state.selectedArtifact === handle ? null : handle;
  $("selected-artifact").textContent = state.selectedArtifact ?? "none";
}

async function fileToBase64(file: File): Promise<string> {
  const buf = new Uint8Array(await file.arrayBuffer());
  let binary = "";
  buf.forEach((b) => (binary += String.fromCharCode(b)));
  return btoa(binary);
}

async function fetchFragmentThumbs(fragmentIds: string[]) {
  for (const id of fragmentIds) {
    if (thumbs.has(id)) continue;
    try {
      const bundle = await api.fragment(id);
      const ref = bundle.rubbing?.image_ref;
      if (ref && bundle.images[ref]) thumbs.set(id, bundle.images[ref]);
    } catch {
      // gallery cards fall back to text-only
    }
  }
}

async function submitTurn() {
  if (state.pending || !state.sessionId) return;
  const queryInput = $("query") as HTMLTextAreaElement;
  const fileInput = $("images") as HTMLInputElement;
  const files = Array.from(fileInput.files ?? []);

  const validation = validateTurnInput(queryInput.value, files.length, state.selectedArtifact);
  $("query-error").textContent = validation.fieldErrors["query"] ?? "";
  if (!validation.ok) return; // no request leaves the page

  setPending(true);
  try {
    const images = await Promise.all(
      files.map(async (f) => ({ png_base64: await fileToBase64(f), name: f.name })),
    );
    const handles = state.selectedArtifact ? [state.selectedArtifact] : [];
    const body = await api.submitTurn(state.sessionId, queryInput.value, images, handles);
    const view = turnViewFromResponse(queryInput.value, body);
    state.turns.push(view);
    uploadsByTurn.set(view.turn, images.map((i) => i.png_base64));
    await fetchFragmentThumbs(view.gallery.filter((g) => g.kind === "fragment").map((g) => g.targetId));
    $("turns").appendChild(
      renderTurn(view, uploadsByTurn.get(view.turn) ?? [], thumbs, selectArtifact),
    );
    queryInput.value = "";
    fileInput.value = "";
    state.selectedArtifact = null;
    $("selected-artifact").textContent = "none";
    setBanner(null);
  } catch (err) {
    if (err instanceof ServiceError && err.detail.field) {
      $("query-error").textContent = `${err.detail.field}: ${err.detail.message}`;
    } else if (err instanceof ServiceError) {
      setBanner(err.message);
    } else {
      setBanner(`service unreachable at ${serviceUrl}`, () => void submitTurn());
    }
  } finally {
    setPending(false);
  }
}

async function browseKb() {
  const input = ($("kb-query") as HTMLInputElement).value.trim();
  const host = $("kb-view");
  host.replaceChildren();
  if (!input) return;
  try {
    if (/\s/.test(input)) {
      const hits = await api.search(input);
      if (!hits.length) {
        host.appendChild(renderEmptyState("no matching texts"));
        return;
      }
      for (const hit of hits) {
        const row = document.createElement("p");
        row.className = "search-hit";
        row.textContent = `#${hit.rank} [${hit.kind}] ${hit.chunk_id} (${hit.score.toFixed(3)}): ${hit.snippet}`;
        host.appendChild(row);
      }
    } else {
      host.appendChild(renderFragmentBundle(await api.fragment(input)));
    }
  } catch (err) {
    if (err instanceof ServiceError && err.status === 404) {
      host.appendChild(renderEmptyState(`nothing found for "${input}"`));
    } else {
      setBanner(`service unreachable at ${serviceUrl}`);
    }
  }
}

export function boot() {
  $("submit").addEventListener("click", () => void submitTurn());
  $("kb-go").addEventListener("click", () => void browseKb());
  void startSession();
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  boot();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", boot);
}
