"""The observe-think-act turn loop over one session.

perceive -> assemble_prompt -> plan -> execute_plan -> synthesize, with
every tool call and result recorded in the turn trace. With the scripted
LLM (or none) and the rule planner the whole loop is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ArgumentError, LlmUnavailableError
from ..images import RasterImage
from ..vision.descriptor import GRID, VisualDescriptor, encode_image, ink_mask
from ..vision.modality import classify_modality
from .catalog import CatalogEntry, ToolContext
from .executor import execute_plan
from .llm import llm_complete
from .planner import Goal, Plan, find_artifact_reference, infer_intent, plan
from .state import SessionState, TurnRecord, now_iso


@dataclass
class PerceivedImage:
    handle: str
    modality: str
    confidence: float
    descriptor: VisualDescriptor
    width: int
    height: int
    error: str | None = None


@dataclass
class PerceptionResult:
    goal: Goal
    images: list[PerceivedImage] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)


@dataclass
class AssembledPrompt:
    preamble: str
    query: str
    evidence: list[dict]

    def render(self) -> str:
        blocks = [self.preamble, f"Query: {self.query}"]
        for ev in self.evidence:
            blocks.append(
                f"[image {ev['handle']}] modality={ev['modality']} "
                f"confidence={ev['confidence']:.2f} size={ev['width']}x{ev['height']} "
                f"ink_ratio={ev['ink_ratio']:.3f} peak_cells={ev['peak_cells']}"
            )
        return "\n".join(blocks)


def perceive(state: SessionState, query: str,
             images: list[tuple[str, RasterImage | bytes]],
             artifact_handles: list[str] | None = None) -> PerceptionResult:
    """Classify and encode each input image, infer the goal intent, and
    resolve references to prior-turn artifacts.

    `artifact_handles` names prior image artifacts explicitly (the console
    sends the clicked crop's handle); otherwise reference phrases in the
    query select the most recent matching crop."""
    if not query.strip() and not images:
        raise ArgumentError("empty input: need a query, images, or both")
    turn = state.t + 1
    perceived: list[PerceivedImage] = []
    errors: list[dict] = []
    for i, (name, payload) in enumerate(images):
        handle = f"img-{turn}-{i}"
        try:
            image = (RasterImage.from_png_bytes(payload)
                     if isinstance(payload, (bytes, bytearray)) else payload)
            modality, confidence = classify_modality(image)
            state.put_artifact(handle, "image", image, order=turn * 10_000 + i,
                               modality=modality.value, name=name, uploaded=True)
            perceived.append(PerceivedImage(
                handle=handle, modality=modality.value, confidence=confidence,
                descriptor=encode_image(image), width=image.width, height=image.height))
        except ArgumentError as exc:
            errors.append({"name": name, "error": str(exc)})

    handles = [p.handle for p in perceived]
    reused: list[str] = []
    if not handles:
        referenced: list[str] = []
        for handle in artifact_handles or []:
            artifact = state.get_artifact(handle)
            if artifact is None or artifact.kind != "image":
                raise ArgumentError(f"unknown artifact handle {handle!r}")
            referenced.append(handle)
        if not referenced:
            phrase_hit = find_artifact_reference(query, state)
            if phrase_hit is not None:
                referenced.append(phrase_hit)
        for handle in referenced:
            artifact = state.artifacts[handle]
            image = artifact.payload
            modality = artifact.meta.get("modality", "single-crop")
            perceived.append(PerceivedImage(
                handle=handle, modality=modality, confidence=1.0,
                descriptor=encode_image(image), width=image.width, height=image.height))
            reused.append(handle)
            handles.append(handle)

    goal = Goal(intent=infer_intent(query), query=query,
                image_handles=tuple(handles), reused_handles=tuple(reused))
    return PerceptionResult(goal=goal, images=perceived, errors=errors)


PREAMBLE = ("You are assisting with ancient-script research over a "
            "cross-referenced knowledge base.")


def assemble_prompt(query: str, perception: PerceptionResult,
                    state: SessionState) -> AssembledPrompt:
    """Unified prompt: framing, verbatim query, one evidence block per image
    handle in input order; reused prior artifacts are named in the preamble."""
    preamble = PREAMBLE
    if perception.goal.reused_handles:
        reused = ", ".join(perception.goal.reused_handles)
        preamble += f" Prior-turn artifacts referenced by this query: {reused}."
    evidence = []
    for p in perception.images:
        image = state.artifacts[p.handle].payload
        mask = ink_mask(image)
        den = p.descriptor.as_array()[: GRID * GRID].reshape(GRID, GRID)
        flat = np.argsort(den.ravel())[::-1][:3]
        peak_cells = [[int(i // GRID), int(i % GRID)] for i in flat]
        evidence.append({
            "handle": p.handle, "modality": p.modality, "confidence": p.confidence,
            "width": p.width, "height": p.height,
            "ink_ratio": float(mask.mean()), "peak_cells": peak_cells,
        })
    return AssembledPrompt(preamble=preamble, query=query, evidence=evidence)


def synthesize_response(goal: Goal, plan_obj: Plan, results: dict[str, dict],
                        llm_client=None) -> str:
    """Template-based rendering of tool results; an available LLM may
    rewrite the prose, but the deterministic rendering is the default."""
    lines = [f"intent: {goal.intent}"]
    for group in plan_obj.groups:
        for call in group:
            response = results[call.call_id]
            if response["status"] != "ok":
                lines.append(f"{call.tool}: {response['status']} ({response.get('error', '')})")
                continue
            data = response["data"]
            if call.tool == "classify_modality":
                lines.append(f"{call.tool}: {data['modality']} "
                             f"(confidence {data['confidence']:.2f})")
            elif call.tool == "detect_characters":
                lines.append(f"{call.tool}: {data['count']} characters at "
                             + " ".join(str(d["bbox"]) for d in data["detections"]))
            elif call.tool in ("retrieve_rubbings", "retrieve_glyphs", "retrieve_texts"):
                tops = ", ".join(
                    f"{h.get('target_id', h.get('chunk_id'))}({h['score']:.3f})"
                    for h in data["hits"][:3])
                lines.append(f"{call.tool}: top hits {tops}")
            elif call.tool == "interpret_fragment":
                readings = " ".join(
                    p["reading"] for p in data["pairs"])
                lines.append(f"{call.tool}: {readings}")
            elif call.tool == "classify_glyph":
                lines.append(f"{call.tool}: {data['class_id']}")
            elif call.tool == "lookup_dictionary":
                lines.append(f"{call.tool}: {len(data['entries'])} entries for "
                             f"{data['class_id']}")
            elif call.tool in ("denoise_character", "generate_facsimile"):
                lines.append(f"{call.tool}: produced {data.get('result_handle', 'image')} "
                             f"({data['width']}x{data['height']})")
            else:
                lines.append(f"{call.tool}: ok")
    rendered = "\n".join(lines)
    if llm_client is not None and getattr(llm_client, "backend", "off") != "off":
        try:
            prompt = f"Rewrite as a short scholarly answer:\n{rendered}"
            rendered = llm_complete(llm_client, prompt).text
        except LlmUnavailableError:
            pass  # deterministic rendering stands
    return rendered


@dataclass
class TurnOutcome:
    turn: int
    response_text: str
    result: dict
    trace: list[dict]
    prompt: AssembledPrompt


def run_turn(state: SessionState, kb, catalog: dict[str, CatalogEntry], query: str,
             images: list[tuple[str, RasterImage | bytes]] | None = None,
             llm_client=None, artifact_handles: list[str] | None = None) -> TurnOutcome:
    """One full observe-think-act turn; tool failures surface in the trace
    and the response, never as an aborted turn."""
    images = images or []
    trace: list[dict] = []
    turn = state.t + 1

    perception = perceive(state, query, images, artifact_handles)
    trace.append({
        "ts": now_iso(), "event": "perceive", "intent": perception.goal.intent,
        "handles": list(perception.goal.image_handles),
        "reused": list(perception.goal.reused_handles),
        "image_errors": perception.errors,
    })

    prompt = assemble_prompt(query, perception, state)
    handle_modalities = {p.handle: p.modality for p in perception.images}
    plan_obj = plan(perception.goal, catalog, handle_modalities, turn, llm_client)
    trace.append({
        "ts": now_iso(), "event": "plan", "template": plan_obj.template_id,
        "groups": plan_obj.tool_order(),
    })

    ctx = ToolContext(kb, state=state, turn=turn)
    results = execute_plan(plan_obj, catalog, ctx, trace=trace)
    response_text = synthesize_response(perception.goal, plan_obj, results, llm_client)
    trace.append({"ts": now_iso(), "event": "respond", "chars": len(response_text)})

    record = TurnRecord(
        index=state.t, query=query,
        image_handles=list(perception.goal.image_handles),
        prompt_text=prompt.render(), plan_summary=plan_obj.tool_order(),
        results=results, response_text=response_text, trace=trace,
    )
    state.record_turn(record)
    return TurnOutcome(turn=turn, response_text=response_text,
                       result={"intent": perception.goal.intent,
                               "template": plan_obj.template_id,
                               "results": results},
                       trace=trace, prompt=prompt)
