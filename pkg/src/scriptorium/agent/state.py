"""Per-session memory: turn history, artifact table, trace plumbing."""

from __future__ import annotations

import json
import hashlib
from dataclasses import dataclass, field
from datetime import datetime, timezone

from ..errors import ArgumentError
from ..images import RasterImage


@dataclass
class Artifact:
    handle: str
    kind: str                 # "image" | "descriptor" | "result"
    payload: object
    meta: dict = field(default_factory=dict)


@dataclass
class TurnRecord:
    index: int
    query: str
    image_handles: list[str]
    prompt_text: str
    plan_summary: list[list[str]]   # tool names per group
    results: dict                   # call_id -> wire response
    response_text: str
    trace: list[dict]


class SessionState:
    """History is append-only; artifacts accumulate monotonically."""

    def __init__(self, session_id: str):
        self.session_id = session_id
        self.history: list[TurnRecord] = []
        self.artifacts: dict[str, Artifact] = {}

    @property
    def t(self) -> int:
        return len(self.history)

    def put_artifact(self, handle: str, kind: str, payload, **meta) -> Artifact:
        if handle in self.artifacts:
            raise ArgumentError(f"artifact handle {handle!r} already exists")
        artifact = Artifact(handle=handle, kind=kind, payload=payload, meta=meta)
        self.artifacts[handle] = artifact
        return artifact

    def get_artifact(self, handle: str) -> Artifact | None:
        return self.artifacts.get(handle)

    def image_artifacts(self, newest_first: bool = True) -> list[Artifact]:
        items = [a for a in self.artifacts.values() if a.kind == "image"]
        items.sort(key=lambda a: a.meta.get("order", 0), reverse=newest_first)
        return items

    def record_turn(self, record: TurnRecord):
        """The update-memory step: appends, never mutates prior turns."""
        if record.index != self.t:
            raise ArgumentError(f"turn index {record.index} != next index {self.t}")
        self.history.append(record)


def now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def args_digest(args: dict) -> str:
    """Canonical digest of resolved call arguments for traces (image
    payloads hash rather than embed)."""

    def strip(value):
        if isinstance(value, RasterImage):
            return {"image_sha256": hashlib.sha256(value.pixels.tobytes()).hexdigest()[:16]}
        if isinstance(value, dict):
            if "png_base64" in value:
                inner = dict(value)
                inner["png_base64"] = hashlib.sha256(
                    value["png_base64"].encode()).hexdigest()[:16]
                return inner
            return {k: strip(v) for k, v in sorted(value.items())}
        if isinstance(value, (list, tuple)):
            return [strip(v) for v in value]
        return value

    return json.dumps(strip(args), sort_keys=True, separators=(",", ":"))


def trace_fingerprint(trace: list[dict]) -> str:
    """Digest of a trace with timestamps removed: identical inputs under the
    deterministic planner/backends give identical fingerprints."""
    stripped = [{k: v for k, v in entry.items() if k != "ts"} for entry in trace]
    return hashlib.sha256(
        json.dumps(stripped, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()
