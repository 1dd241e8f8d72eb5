// DOM rendering: trace timeline, detection overlays, retrieval gallery,
// fragment browser. Thin layer over the pure helpers in model.ts.

import type { CharacterRecord, FragmentBundle } from "./api.js";
import type { Detection, GalleryItem, TimelineStep, TurnView } from "./model.js";
import { overlayRect } from "./model.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

const STATUS_BADGE: Record<TimelineStep["status"], string> = {
  pending: "…",
  ok: "ok",
  error: "error",
  skipped: "skipped",
};

export function renderTimeline(groups: TimelineStep[][]): HTMLElement {
  const list = el("ol", "timeline");
  groups.forEach((group, i) => {
    const item = el("li", "timeline-group");
    item.appendChild(el("span", "group-index", `step ${i + 1}`));
    for (const step of group) {
      const badge = el("span", `badge badge-${step.status}`, STATUS_BADGE[step.status]);
      const row = el("span", "timeline-step");
      row.appendChild(el("code", "tool-name", step.tool));
      row.appendChild(badge);
      if (step.error) row.title = step.error;
      item.appendChild(row);
    }
    list.appendChild(item);
  });
  return list;
}

export function renderImageWithOverlays(
  pngBase64: string,
  detections: Detection[],
  onCropClick?: (handle: string) => void,
): HTMLElement {
  const wrap = el("div", "image-overlay-wrap");
  const img = el("img", "preview") as HTMLImageElement;
  img.src = `data:image/png;base64,${pngBase64}`;
  wrap.appendChild(img);
  img.addEventListener("load", () => {
    const natural = { width: img.naturalWidth, height: img.naturalHeight };
    const display = { width: img.clientWidth || natural.width, height: img.clientHeight || natural.height };
    detections.forEach((det, i) => {
      const rect = overlayRect(det.bbox, natural, display);
      const box = el("div", "bbox-overlay");
      box.style.left = `${rect.left}px`;
      box.style.top = `${rect.top}px`;
      box.style.width = `${rect.width}px`;
      box.style.height = `${rect.height}px`;
      box.dataset.index = String(i);
      const label = el("span", "bbox-label", `${i + 1} (${det.score.toFixed(2)})`);
      box.appendChild(label);
      if (det.cropHandle && onCropClick) {
        box.classList.add("clickable");
        box.addEventListener("click", () => onCropClick(det.cropHandle!));
      }
      wrap.appendChild(box);
    });
  });
  return wrap;
}

export function renderGallery(
  items: GalleryItem[],
  thumbs: Map<string, string>,
): HTMLElement {
  const grid = el("div", "gallery");
  for (const item of items) {
    const card = el("figure", "gallery-card");
    const thumb = thumbs.get(item.targetId);
    if (thumb) {
      const img = el("img", "thumb") as HTMLImageElement;
      img.src = `data:image/png;base64,${thumb}`;
      card.appendChild(img);
    } else if (item.snippet) {
      card.appendChild(el("blockquote", "snippet", item.snippet));
    }
    card.appendChild(
      el("figcaption", "caption", `#${item.rank} ${item.targetId} — ${item.score.toFixed(3)}`),
    );
    grid.appendChild(card);
  }
  return grid;
}

export function renderTurn(
  view: TurnView,
  uploadedImages: string[],
  thumbs: Map<string, string>,
  onCropClick?: (handle: string) => void,
): HTMLElement {
  const section = el("section", "turn");
  section.appendChild(el("h3", "turn-title", `turn ${view.turn}: ${view.query}`));
  for (const b64 of uploadedImages) {
    section.appendChild(renderImageWithOverlays(b64, view.detections, onCropClick));
  }
  section.appendChild(renderTimeline(view.groups));
  if (view.gallery.length) {
    section.appendChild(el("h4", undefined, "retrieval hits"));
    section.appendChild(renderGallery(view.gallery, thumbs));
  }
  section.appendChild(el("pre", "response", view.response));
  return section;
}

export function renderFragmentBundle(bundle: FragmentBundle): HTMLElement {
  const section = el("section", "fragment-view");
  section.appendChild(el("h3", undefined, bundle.fragment_id));
  const pair = el("div", "side-by-side");
  const panels: [string | undefined, CharacterRecord[] | null][] = [
    [bundle.rubbing?.image_ref, bundle.characters],
    [bundle.facsimile?.image_ref, bundle.characters],
  ];
  for (const [ref, chars] of panels) {
    if (!ref || !(ref in bundle.images)) continue;
    const detections: Detection[] = (chars ?? []).map((c) => ({
      bbox: c.bbox,
      score: 1,
    }));
    const panel = renderImageWithOverlays(bundle.images[ref], detections);
    // reading-order numbers come straight from the records
    panel.querySelectorAll(".bbox-label").forEach((label, i) => {
      label.textContent = String((chars ?? [])[i]?.reading_index ?? i);
    });
    pair.appendChild(panel);
  }
  section.appendChild(pair);
  for (const interp of bundle.interpretations) {
    section.appendChild(el("p", "interpretation", `${interp.source}: ${interp.text}`));
  }
  return section;
}

export function renderEmptyState(message: string): HTMLElement {
  return el("div", "empty-state", message);
}

export function renderBanner(message: string, retry?: () => void): HTMLElement {
  const banner = el("div", "banner", message);
  if (retry) {
    const button = el("button", "retry", "retry");
    button.addEventListener("click", retry);
    banner.appendChild(button);
  }
  return banner;
}
