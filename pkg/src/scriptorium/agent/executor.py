"""Plan execution: serial groups, parallel calls within a group, data-flow
resolution, and graceful degradation on failures."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from ..errors import ArgumentError
from .catalog import CatalogEntry, ToolContext, dispatch_tool
from .planner import Plan, ToolCall, validate_plan
from .state import args_digest, now_iso


class SkippedDependency(Exception):
    def __init__(self, source: str):
        self.source = source
        super().__init__(f"depends on {source}")


def _resolve_path(data: dict, path: str):
    current = data
    for part in path.split("."):
        if isinstance(current, list):
            try:
                current = current[int(part)]
            except (ValueError, IndexError) as exc:
                raise ArgumentError(f"unresolvable result path {path!r}") from exc
        elif isinstance(current, dict):
            if part not in current:
                raise ArgumentError(f"unresolvable result path {path!r}")
            current = current[part]
        else:
            raise ArgumentError(f"unresolvable result path {path!r}")
    return current


def resolve_args(args: dict, results: dict[str, dict]):
    """Substitute $from/$format placeholders with earlier call results."""

    def resolve(value):
        if isinstance(value, dict):
            if "$from" in value:
                source = value["$from"]
                response = results.get(source)
                if response is None or response["status"] != "ok":
                    raise SkippedDependency(source)
                return _resolve_path(response.get("data", {}), value.get("path", ""))
            if "$format" in value:
                bindings = {k: resolve(v) for k, v in value.items() if k != "$format"}
                return value["$format"].format(**bindings)
            return {k: resolve(v) for k, v in value.items()}
        if isinstance(value, list):
            return [resolve(v) for v in value]
        return value

    return {k: resolve(v) for k, v in args.items()}


def execute_plan(plan: Plan, catalog: dict[str, CatalogEntry], ctx: ToolContext,
                 trace: list[dict] | None = None) -> dict[str, dict]:
    """Run groups in order; intra-group calls run concurrently but results
    are recorded in plan order. A failed call marks its dependents skipped;
    nothing here ever aborts the turn."""
    validate_plan(plan, catalog)
    results: dict[str, dict] = {}
    trace = trace if trace is not None else []

    for group in plan.groups:
        prepared: list[tuple[ToolCall, dict | None, dict | None]] = []
        for call in group:
            try:
                resolved = resolve_args(call.args, results)
                prepared.append((call, resolved, None))
            except SkippedDependency as exc:
                prepared.append((call, None, {
                    "call_id": call.call_id, "status": "skipped", "data": {},
                    "error": f"dependency_failed: {exc.source}"}))
            except ArgumentError as exc:
                prepared.append((call, None, {
                    "call_id": call.call_id, "status": "error", "data": {},
                    "error": f"invalid_argument: {exc}"}))

        runnable = [(call, resolved) for call, resolved, pre in prepared if pre is None]
        for call, resolved, pre in prepared:
            trace.append({
                "ts": now_iso(), "event": "tool_call", "call_id": call.call_id,
                "tool": call.tool,
                "args": args_digest(resolved if resolved is not None else call.args),
            })

        responses: dict[str, dict] = {}
        if runnable:
            if len(runnable) == 1:
                call, resolved = runnable[0]
                responses[call.call_id] = dispatch_tool(
                    {"tool": call.tool, "args": resolved, "call_id": call.call_id},
                    catalog, ctx)
            else:
                with ThreadPoolExecutor(max_workers=len(runnable)) as pool:
                    futures = {
                        call.call_id: pool.submit(
                            dispatch_tool,
                            {"tool": call.tool, "args": resolved, "call_id": call.call_id},
                            catalog, ctx)
                        for call, resolved in runnable
                    }
                responses = {cid: fut.result() for cid, fut in futures.items()}

        for call, resolved, pre in prepared:  # plan order, not completion order
            response = pre if pre is not None else responses[call.call_id]
            results[call.call_id] = response
            trace.append({
                "ts": now_iso(), "event": "tool_result", "call_id": call.call_id,
                "tool": call.tool, "status": response["status"],
                **({"error": response["error"]} if response.get("error") else {}),
            })
    return results
