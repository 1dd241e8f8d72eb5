"""Benchmark model clients.

A client answers one question with raw text (base64 PNG for generation
questions); the runner extracts and scores. The oracle client reads the
question's ground truth and is the perfect-score reference; the scripted
client replays canned responses (gibberish by default) for protocol
tests; the remote client forwards prompts to an LLM backend; the tool
client answers with this package's own vision/text tools.
"""

from __future__ import annotations

from ..errors import LlmUnavailableError
from ..images import BoundingBox, RasterImage
from ..vision.cleanup import generate_facsimile
from ..vision.modality import classify_modality
from ..vision.descriptor import cosine_similarity, encode_image
from ..vision.segmentation import detect_characters
from .questions import MODALITY_OPTIONS, QuestionInstance


class OracleClient:
    """Answers straight from ground truth; every metric should be perfect."""

    name = "oracle"

    def answer(self, question: QuestionInstance, attempt: int,
               images: dict[str, RasterImage]) -> str:
        gt = question.ground_truth
        if question.qtype == "yes-no":
            return "Yes" if gt["answer"] == "yes" else "No"
        if question.qtype == "which":
            return gt["option"]
        if question.qtype == "how":
            value = gt.get("probability", gt.get("count"))
            return str(value)
        if question.qtype == "where":
            return " ".join(str(list(box)) for box in gt["boxes"])
        # generate
        return images[gt["target_ref"]].to_base64_png()


class ScriptedClient:
    """Canned responses keyed by qid; one entry per attempt when a list."""

    name = "scripted"

    def __init__(self, responses: dict[str, str | list[str]] | None = None,
                 default: str = "lorem ipsum"):
        self.responses = responses or {}
        self.default = default

    def answer(self, question: QuestionInstance, attempt: int,
               images: dict[str, RasterImage]) -> str:
        entry = self.responses.get(question.qid, self.default)
        if isinstance(entry, list):
            return entry[min(attempt - 1, len(entry) - 1)]
        return entry


class RemoteClient:
    """Forwards the question prompt to an LLM backend (text-only)."""

    name = "remote"

    def __init__(self, llm_client):
        self.llm_client = llm_client

    def answer(self, question: QuestionInstance, attempt: int,
               images: dict[str, RasterImage]) -> str:
        note = " ".join(f"<image{i + 1}:{ref}>" for i, ref in enumerate(question.image_refs))
        try:
            return self.llm_client.complete(f"{question.prompt}\n{note}").text
        except LlmUnavailableError as exc:
            raise RuntimeError(str(exc)) from exc


class ToolClient:
    """Answers with the package's own deterministic tools (the system row)."""

    name = "tool"

    def __init__(self, snapshot):
        self.snapshot = snapshot

    def answer(self, question: QuestionInstance, attempt: int,
               images: dict[str, RasterImage]) -> str:
        q = question
        if q.task in ("retrieval", "classification") and q.qtype in ("yes-no", "how"):
            a = encode_image(images[q.image_refs[0]])
            b = encode_image(images[q.image_refs[1]])
            sim = cosine_similarity(a, b)
            if q.qtype == "yes-no":
                return "Yes" if sim >= 0.75 else "No"
            return str(int(round(max(0.0, min(1.0, sim)) * 100)))
        if q.task == "modality":
            modality, _ = classify_modality(images[q.image_refs[0]])
            letter = next(k for k, v in MODALITY_OPTIONS.items() if v == modality.value)
            return letter
        if q.task == "detection":
            dets = detect_characters(images[q.image_refs[0]])
            if q.qtype == "how":
                return str(len(dets))
            return " ".join(str(list(d.bbox.as_tuple())) for d in dets)
        if q.task == "generation":
            return generate_facsimile(images[q.image_refs[0]]).to_base64_png()
        if q.task == "case-retrieval":
            # count instances of the class on the named fragment via the index
            fragment_id = q.ground_truth["fragment_id"]
            class_id = q.ground_truth["class_id"]
            instances = self.snapshot.indexes.class_instances.get(class_id, [])
            count = sum(
                1 for key in instances
                if self.snapshot.characters[key].fragment_id == fragment_id
            )
            return str(count)
        raise RuntimeError(f"tool client cannot answer task {q.task!r}")
