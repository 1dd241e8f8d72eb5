"""Intent inference and plan construction.

The rule planner maps an inferred intent to canonical workflow templates
and picks the applicable template maximizing an additive utility: each
step contributes +1 when its required inputs are available and -inf
otherwise, so the highest-utility template is the longest fully-runnable
workflow. Ties break by ascending template id. The optional LLM planner
emits wire-format tool calls, schema-validated with one repair round,
then falls back to the rule planner.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from ..errors import ArgumentError, LlmUnavailableError, PlanningError
from .catalog import CatalogEntry
from .llm import llm_complete

INTENTS = (
    "analyze-rubbing",
    "identify-character",
    "find-occurrences",
    "generate-facsimile",
    "lookup-literature",
    "freeform",
)

# keyword table, scanned in order; first hit wins (documented in docs/)
INTENT_KEYWORDS: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("generate-facsimile", ("facsimile", "transform", "convert")),
    ("lookup-literature", ("catalogue", "catalog", "literature", "dictionary",
                           "document", "gloss", "reference")),
    ("find-occurrences", ("occurrence", "occurrences", "appear", "appears",
                          "where else")),
    ("identify-character", ("identify", "what character", "which character",
                            "recognize", "denoise", "classify")),
    ("analyze-rubbing", ("analyze", "analyse", "interpret", "interpretation",
                         "reading", "read ")),
)

REFERENCE_PHRASES = ("last response", "previous", "earlier", "that character",
                     "this character", "the character", "from the last")
ORDINALS = {"first": 0, "second": 1, "third": 2, "fourth": 3, "fifth": 4}


@dataclass(frozen=True)
class Goal:
    intent: str
    query: str
    image_handles: tuple[str, ...] = ()
    reused_handles: tuple[str, ...] = ()


@dataclass(frozen=True)
class ToolCall:
    call_id: str
    tool: str
    args: dict

    def to_wire(self) -> dict:
        return {"tool": self.tool, "args": self.args, "call_id": self.call_id}


@dataclass
class Plan:
    groups: list[list[ToolCall]]
    template_id: str | None = None

    def tool_order(self) -> list[list[str]]:
        return [[call.tool for call in group] for group in self.groups]

    def all_calls(self) -> list[ToolCall]:
        return [call for group in self.groups for call in group]


def infer_intent(query: str) -> str:
    lowered = query.lower()
    for intent, words in INTENT_KEYWORDS:
        if any(w in lowered for w in words):
            return intent
    return "freeform"


def find_artifact_reference(query: str, state) -> str | None:
    """Resolve phrases like "the second character from the last response" to
    a prior crop artifact handle; None when the query references nothing."""
    lowered = query.lower()
    if not any(phrase in lowered for phrase in REFERENCE_PHRASES):
        return None
    crops = [a for a in state.image_artifacts(newest_first=False)
             if a.meta.get("modality") in ("single-crop", "single-rubbing")]
    if not crops:
        return None
    for word, position in ORDINALS.items():
        if re.search(rf"\b{word}\b", lowered):
            source_turnwise = sorted(crops, key=lambda a: a.meta.get("order", 0))
            # ordinal indexes into the most recent turn's crops, detector order
            last_call = source_turnwise[-1].meta.get("source_call")
            same_call = [a for a in source_turnwise if a.meta.get("source_call") == last_call]
            if position < len(same_call):
                return same_call[position].handle
            return same_call[-1].handle
    return crops[-1].handle  # newest crop


# -- templates ----------------------------------------------------------------

# placeholder grammar inside template args:
#   "$query"                      the verbatim user query
#   "$image:any|whole|single"     an input image handle of that modality family
#   {"$from": step, "path": p}    a field of an earlier step's result data
#   {"$format": "...{x}...", x: <placeholder>}  string assembly at run time
@dataclass(frozen=True)
class StepDef:
    step: str
    tool: str
    args: dict


@dataclass(frozen=True)
class PlanTemplate:
    template_id: str
    intents: tuple[str, ...]
    groups: tuple[tuple[StepDef, ...], ...]

    def steps(self) -> list[StepDef]:
        return [s for g in self.groups for s in g]


TEMPLATES: tuple[PlanTemplate, ...] = (
    PlanTemplate(
        template_id="analyze-rubbing-full",
        intents=("analyze-rubbing", "freeform"),
        groups=(
            (StepDef("s1", "classify_modality", {"image": "$image:any"}),),
            (StepDef("s2", "detect_characters", {"image": "$image:whole"}),),
            (StepDef("s3", "retrieve_rubbings", {"image": "$image:whole", "k": 3}),),
            (
                StepDef("s4", "retrieve_texts", {
                    "query": {"$format": "{fragment} {query}",
                              "fragment": {"$from": "s3", "path": "hits.0.target_id"},
                              "query": "$query"},
                    "k": 5}),
                StepDef("s5", "interpret_fragment", {
                    "fragment_id": {"$from": "s3", "path": "hits.0.target_id"}}),
            ),
        ),
    ),
    PlanTemplate(
        template_id="identify-character",
        intents=("identify-character", "lookup-literature", "freeform"),
        groups=(
            (StepDef("s1", "denoise_character", {"image": "$image:single"}),),
            (StepDef("s2", "retrieve_glyphs", {
                "image": {"$from": "s1", "path": "result_handle"},
                "index": "standards", "k": 5}),),
            (StepDef("s3", "lookup_dictionary", {
                "class_id": {"$from": "s2", "path": "hits.0.class_id"}}),),
        ),
    ),
    PlanTemplate(
        template_id="locate-occurrences",
        intents=("find-occurrences",),
        groups=(
            (StepDef("s1", "classify_glyph", {"image": "$image:single"}),),
            (StepDef("s2", "retrieve_glyphs", {"image": "$image:single",
                                               "index": "instances", "k": 5}),),
            (
                StepDef("s3", "lookup_dictionary", {
                    "class_id": {"$from": "s1", "path": "class_id"}}),
                StepDef("s4", "retrieve_texts", {
                    "query": {"$format": "token-{cls}",
                              "cls": {"$from": "s1", "path": "class_id"}},
                    "k": 5}),
            ),
        ),
    ),
    PlanTemplate(
        template_id="facsimile-generation",
        intents=("generate-facsimile",),
        groups=(
            (StepDef("s1", "classify_modality", {"image": "$image:any"}),),
            (StepDef("s2", "generate_facsimile", {"image": "$image:whole"}),),
        ),
    ),
    PlanTemplate(
        template_id="literature-query",
        intents=("lookup-literature", "freeform", "analyze-rubbing",
                 "find-occurrences", "identify-character"),
        groups=(
            (StepDef("s1", "retrieve_texts", {"query": "$query", "k": 5}),),
        ),
    ),
)


def _placeholder_available(value, handle_modalities: dict[str, str], query: str) -> bool:
    if value == "$query":
        return bool(query.strip())
    if isinstance(value, str) and value.startswith("$image:"):
        family = value.split(":", 1)[1]
        return _pick_image(family, handle_modalities) is not None
    if isinstance(value, dict):
        if "$from" in value:
            return True  # produced by an earlier step of the same template
        if "$format" in value:
            return all(
                _placeholder_available(v, handle_modalities, query)
                for k, v in value.items() if k != "$format"
            )
        return all(_placeholder_available(v, handle_modalities, query) for v in value.values())
    if isinstance(value, list):
        return all(_placeholder_available(v, handle_modalities, query) for v in value)
    return True


def _pick_image(family: str, handle_modalities: dict[str, str]) -> str | None:
    """First handle (input order) whose modality matches the family."""
    for handle, modality in handle_modalities.items():
        if family == "any":
            return handle
        if family == "whole" and modality.startswith("whole"):
            return handle
        if family == "single" and (modality.startswith("single") or modality == "single-crop"):
            return handle
    return None


def template_utility(template: PlanTemplate, handle_modalities: dict[str, str],
                     query: str) -> float:
    """Additive availability utility; -inf as soon as one step cannot run."""
    total = 0.0
    for step in template.steps():
        ok = all(
            _placeholder_available(v, handle_modalities, query)
            for v in step.args.values()
        )
        if not ok:
            return float("-inf")
        total += 1.0
    return total


def _instantiate(template: PlanTemplate, handle_modalities: dict[str, str],
                 query: str, turn: int) -> Plan:
    def substitute(value):
        if value == "$query":
            return query
        if isinstance(value, str) and value.startswith("$image:"):
            handle = _pick_image(value.split(":", 1)[1], handle_modalities)
            if handle is None:
                raise PlanningError(f"no image available for {value}")
            return handle
        if isinstance(value, dict):
            if "$from" in value:
                return {"$from": f"t{turn}.{value['$from']}", "path": value["path"]}
            if "$format" in value:
                return {k: (v if k == "$format" else substitute(v)) for k, v in value.items()}
            return {k: substitute(v) for k, v in value.items()}
        if isinstance(value, list):
            return [substitute(v) for v in value]
        return value

    groups = [
        [
            ToolCall(call_id=f"t{turn}.{step.step}", tool=step.tool,
                     args={k: substitute(v) for k, v in step.args.items()})
            for step in group
        ]
        for group in template.groups
    ]
    return Plan(groups=groups, template_id=template.template_id)


def applicable_utilities(goal: Goal, handle_modalities: dict[str, str]) -> dict[str, float]:
    """Utility per template serving the goal's intent (audit/test hook)."""
    return {
        t.template_id: template_utility(t, handle_modalities, goal.query)
        for t in TEMPLATES
        if goal.intent in t.intents
    }


def plan_rule_based(goal: Goal, handle_modalities: dict[str, str], turn: int) -> Plan:
    utilities = applicable_utilities(goal, handle_modalities)
    viable = {tid: u for tid, u in utilities.items() if u != float("-inf")}
    if not viable:
        raise PlanningError(
            f"no applicable plan template for intent {goal.intent!r} "
            f"(images: {list(handle_modalities) or 'none'})"
        )
    best_id = min(viable, key=lambda tid: (-viable[tid], tid))
    template = next(t for t in TEMPLATES if t.template_id == best_id)
    return _instantiate(template, handle_modalities, goal.query, turn)


# -- LLM-backed planning -------------------------------------------------------

PLANNER_PROMPT = """You orchestrate analysis tools for ancient-script research.
Available tools (name: required args):
{catalog}

User goal (intent {intent}): {query}
Available image handles: {handles}

Reply with ONLY a JSON array of tool calls, e.g.
[{{"tool": "classify_modality", "args": {{"image": "<handle>"}}}}]"""


def render_planner_prompt(goal: Goal, catalog: dict[str, CatalogEntry],
                          handle_modalities: dict[str, str]) -> str:
    lines = [
        f"- {name}: {', '.join(k for k, p in entry.spec.params.items() if p.required)}"
        for name, entry in sorted(catalog.items())
    ]
    return PLANNER_PROMPT.format(
        catalog="\n".join(lines), intent=goal.intent, query=goal.query,
        handles=json.dumps(handle_modalities, sort_keys=True))


def _parse_calls(text: str, catalog: dict[str, CatalogEntry], turn: int) -> list[ToolCall]:
    match = re.search(r"\[.*\]", text, flags=re.DOTALL)
    if not match:
        raise ArgumentError("no JSON array of tool calls in completion")
    raw = json.loads(match.group(0))
    calls = []
    for i, item in enumerate(raw, start=1):
        name = item.get("tool")
        entry = catalog.get(name)
        if entry is None:
            raise ArgumentError(f"unknown tool {name!r}")
        args = entry.spec.validate_args(item.get("args") or {})
        calls.append(ToolCall(call_id=f"t{turn}.llm{i}", tool=name, args=args))
    return calls


def plan_with_llm(goal: Goal, catalog: dict[str, CatalogEntry],
                  handle_modalities: dict[str, str], client, turn: int) -> Plan:
    """One planning round plus exactly one schema-repair round."""
    prompt = render_planner_prompt(goal, catalog, handle_modalities)
    completion = llm_complete(client, prompt)
    try:
        calls = _parse_calls(completion.text, catalog, turn)
    except (ArgumentError, json.JSONDecodeError) as exc:
        repair = f"{prompt}\n\nYour previous reply was invalid ({exc}). Reply again."
        completion = llm_complete(client, repair)
        calls = _parse_calls(completion.text, catalog, turn)  # raises on second failure
    return Plan(groups=[[c] for c in calls], template_id="llm")


def plan(goal: Goal, catalog: dict[str, CatalogEntry],
         handle_modalities: dict[str, str], turn: int, llm_client=None) -> Plan:
    """Planner entry point: LLM backend when configured, with rule-based
    fallback; the rule planner is the deterministic default."""
    if not goal.query.strip() and not handle_modalities:
        raise ArgumentError("goal payload is empty: no query text and no images")
    if not catalog:
        raise PlanningError("tool catalog is empty")
    if llm_client is not None and getattr(llm_client, "backend", "off") != "off":
        try:
            return plan_with_llm(goal, catalog, handle_modalities, llm_client, turn)
        except (LlmUnavailableError, ArgumentError, json.JSONDecodeError):
            pass  # deterministic fallback below
    return plan_rule_based(goal, handle_modalities, turn)


def validate_plan(plan_obj: Plan, catalog: dict[str, CatalogEntry]):
    """Structural checks: known tools, schema-valid static args, and acyclic
    data flow (every $from points at a strictly earlier group)."""
    seen: set[str] = set()
    for group in plan_obj.groups:
        group_ids = set()
        for call in group:
            entry = catalog.get(call.tool)
            if entry is None:
                raise PlanningError(f"plan references unknown tool {call.tool!r}")
            if call.call_id in seen or call.call_id in group_ids:
                raise PlanningError(f"duplicate call id {call.call_id!r}")
            group_ids.add(call.call_id)
            for ref in _iter_refs(call.args):
                if ref not in seen:
                    raise PlanningError(
                        f"call {call.call_id} reads {ref!r} which is not produced "
                        "by an earlier group")
        seen |= group_ids


def _iter_refs(value):
    if isinstance(value, dict):
        if "$from" in value:
            yield value["$from"]
        else:
            for v in value.values():
                yield from _iter_refs(v)
    elif isinstance(value, list):
        for v in value:
            yield from _iter_refs(v)
