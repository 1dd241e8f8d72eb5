"""Pluggable LLM backends: remote chat-completion, scripted fixtures, off.

The scripted client maps prompt fingerprints to canned completions so the
whole agent loop runs deterministically in tests. The remote client talks
to any chat-completions-style HTTP endpoint and retries transient
transport failures up to 3 attempts total.

Environment configuration:
    SCRIPTORIUM_LLM_MODE   remote | scripted | off   (default: off)
    SCRIPTORIUM_LLM_URL    chat-completions endpoint (remote mode)
    SCRIPTORIUM_LLM_KEY    bearer token, optional
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

import httpx

from ..errors import LlmUnavailableError

MAX_ATTEMPTS = 3


@dataclass
class LlmCompletion:
    text: str
    attempts: int
    backend: str


def prompt_fingerprint(prompt: str) -> str:
    """Whitespace-normalized sha256 prefix; keys for scripted fixtures."""
    normalized = " ".join(prompt.split())
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()[:16]


class ScriptedLlmClient:
    """Fixture-backed client: exact prompts or fingerprints -> canned text."""

    backend = "scripted"

    def __init__(self, fixtures: dict[str, str] | None = None):
        self.fixtures = dict(fixtures or {})

    def add(self, prompt: str, completion: str):
        self.fixtures[prompt_fingerprint(prompt)] = completion

    def complete(self, prompt: str) -> LlmCompletion:
        for key in (prompt, prompt_fingerprint(prompt)):
            if key in self.fixtures:
                return LlmCompletion(text=self.fixtures[key], attempts=1, backend=self.backend)
        raise LlmUnavailableError(
            f"no scripted fixture for prompt fingerprint {prompt_fingerprint(prompt)}"
        )


class RemoteLlmClient:
    """Chat-completions HTTP client with a bounded retry policy."""

    backend = "remote"

    def __init__(self, url: str, api_key: str | None = None, model: str = "default",
                 timeout: float = 30.0, max_attempts: int = MAX_ATTEMPTS,
                 transport: httpx.BaseTransport | None = None):
        self.url = url
        self.api_key = api_key
        self.model = model
        self.timeout = timeout
        self.max_attempts = max_attempts
        self._transport = transport

    def complete(self, prompt: str) -> LlmCompletion:
        headers = {"content-type": "application/json"}
        if self.api_key:
            headers["authorization"] = f"Bearer {self.api_key}"
        body = {"model": self.model, "messages": [{"role": "user", "content": prompt}]}
        last_error: Exception | None = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                with httpx.Client(timeout=self.timeout, transport=self._transport) as client:
                    resp = client.post(self.url, json=body, headers=headers)
                resp.raise_for_status()
                payload = resp.json()
                text = payload["choices"][0]["message"]["content"]
                return LlmCompletion(text=text, attempts=attempt, backend=self.backend)
            except (httpx.TransportError, httpx.HTTPStatusError, KeyError,
                    json.JSONDecodeError) as exc:
                last_error = exc
        raise LlmUnavailableError(
            f"remote LLM failed after {self.max_attempts} attempts: {last_error}"
        )


class OffLlmClient:
    backend = "off"

    def complete(self, prompt: str) -> LlmCompletion:
        raise LlmUnavailableError("LLM backend is disabled (mode=off)")


@dataclass
class LlmConfig:
    mode: str = "off"
    url: str = ""
    key: str = ""
    fixtures: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_env(cls, env: dict | None = None) -> "LlmConfig":
        env = os.environ if env is None else env
        return cls(
            mode=env.get("SCRIPTORIUM_LLM_MODE", "off"),
            url=env.get("SCRIPTORIUM_LLM_URL", ""),
            key=env.get("SCRIPTORIUM_LLM_KEY", ""),
        )


def make_client(config: LlmConfig):
    if config.mode == "remote":
        return RemoteLlmClient(url=config.url, api_key=config.key or None)
    if config.mode == "scripted":
        return ScriptedLlmClient(config.fixtures)
    return OffLlmClient()


def llm_complete(client, prompt: str) -> LlmCompletion:
    """Single entry point used by the loop; raises LlmUnavailableError when
    the backend cannot produce text."""
    return client.complete(prompt)
