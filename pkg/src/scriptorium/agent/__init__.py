from .catalog import CatalogEntry, ParamSpec, ToolContext, ToolSpec, build_catalog, dispatch_tool
from .executor import execute_plan, resolve_args
from .llm import (
    LlmCompletion,
    LlmConfig,
    OffLlmClient,
    RemoteLlmClient,
    ScriptedLlmClient,
    llm_complete,
    make_client,
    prompt_fingerprint,
)
from .loop import (
    AssembledPrompt,
    PerceptionResult,
    TurnOutcome,
    assemble_prompt,
    perceive,
    run_turn,
    synthesize_response,
)
from .planner import (
    Goal,
    Plan,
    PlanTemplate,
    TEMPLATES,
    ToolCall,
    applicable_utilities,
    infer_intent,
    plan,
    plan_rule_based,
    validate_plan,
)
from .state import Artifact, SessionState, TurnRecord, trace_fingerprint

__all__ = [
    "CatalogEntry", "ParamSpec", "ToolContext", "ToolSpec", "build_catalog", "dispatch_tool",
    "execute_plan", "resolve_args",
    "LlmCompletion", "LlmConfig", "OffLlmClient", "RemoteLlmClient", "ScriptedLlmClient",
    "llm_complete", "make_client", "prompt_fingerprint",
    "AssembledPrompt", "PerceptionResult", "TurnOutcome", "assemble_prompt", "perceive",
    "run_turn", "synthesize_response",
    "Goal", "Plan", "PlanTemplate", "TEMPLATES", "ToolCall", "applicable_utilities",
    "infer_intent", "plan", "plan_rule_based", "validate_plan",
    "Artifact", "SessionState", "TurnRecord", "trace_fingerprint",
]
