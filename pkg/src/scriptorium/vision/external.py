"""Pluggable external-model clients for the vision tools.

Deep models (learned detectors, image-to-image translators, generative
facsimile models, learned classifiers) slot in behind the deterministic
pipelines without engine changes. All clients share one interface over
the tool-call wire format's payload conventions:

    request:  {"instruction": str, "images": [{"png_base64": str}, ...]}
    response: {"image": {"png_base64": str}}                  (translators)
              {"detections": [{"bbox": [x0,y0,x1,y1], "score": s}, ...]}
              {"modality": str, "confidence": float}          (classifiers)

A tool called with a client uses the client's answer, validated against
the same output contracts the deterministic pipeline honors.
"""

from __future__ import annotations

from typing import Protocol

from ..errors import ArgumentError
from ..images import BoundingBox, RasterImage


class ExternalModelClient(Protocol):
    def infer(self, request: dict) -> dict: ...


def image_request(instruction: str, *images: RasterImage) -> dict:
    return {
        "instruction": instruction,
        "images": [{"png_base64": img.to_base64_png()} for img in images],
    }


def decode_image_response(response: dict) -> RasterImage:
    payload = response.get("image")
    if not isinstance(payload, dict) or "png_base64" not in payload:
        raise ArgumentError("external model response carries no image payload")
    return RasterImage.from_base64_png(payload["png_base64"])


def decode_detections_response(response: dict, width: int, height: int) -> list[tuple[BoundingBox, float]]:
    raw = response.get("detections")
    if not isinstance(raw, list):
        raise ArgumentError("external model response carries no detections")
    out = []
    for item in raw:
        box = BoundingBox.from_list(item.get("bbox") or [])
        if not box.within(width, height):
            raise ArgumentError(f"external detection {box.as_tuple()} exceeds image bounds")
        score = float(item.get("score", 0.0))
        if not 0.0 <= score <= 1.0:
            raise ArgumentError(f"external detection score {score} outside [0, 1]")
        out.append((box, score))
    return out
