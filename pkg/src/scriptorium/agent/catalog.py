"""Tool catalog: schemas, implementations over a KB snapshot, and the
structured wire protocol.

Wire format (used in-process and over HTTP, bit-exact):

    request:  {"tool": str, "args": object, "call_id": str}
    response: {"call_id": str, "status": "ok"|"error", "data": object,
               "error": str?}

Image-valued arguments accept three forms: an artifact handle string
(session context), {"png_base64": "..."} inline PNG bytes, or
{"kb_image": "<path key>"} referencing a snapshot image.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..errors import ArgumentError, NotFoundError, ScriptoriumError
from ..images import RasterImage
from ..text.index import retrieve_texts
from ..text.interpret import UNREADABLE, interpret_fragment, lookup_dictionary
from ..vision.cleanup import denoise_character, generate_facsimile
from ..vision.descriptor import encode_image
from ..vision.modality import classify_modality
from ..vision.retrieval import classify_glyph, retrieve_rubbings
from ..vision.segmentation import detect_characters


@dataclass(frozen=True)
class ParamSpec:
    type: str              # "image" | "string" | "int" | "number" | "box"
    required: bool = True
    default: object = None


@dataclass(frozen=True)
class ToolSpec:
    name: str
    description: str
    params: dict[str, ParamSpec]
    result_keys: tuple[str, ...]
    example_args: dict

    def validate_args(self, args: dict) -> dict:
        """Schema-check and fill defaults; raises ArgumentError with the
        offending field name."""
        if not isinstance(args, dict):
            raise ArgumentError("args must be an object")
        unknown = set(args) - set(self.params)
        if unknown:
            raise ArgumentError(f"unknown argument {sorted(unknown)[0]!r} for {self.name}")
        out = {}
        for name, spec in self.params.items():
            if name not in args:
                if spec.required:
                    raise ArgumentError(f"missing required argument {name!r} for {self.name}")
                out[name] = spec.default
                continue
            value = args[name]
            if spec.type == "int":
                if not isinstance(value, int) or isinstance(value, bool):
                    raise ArgumentError(f"argument {name!r} must be an integer")
            elif spec.type == "number":
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    raise ArgumentError(f"argument {name!r} must be a number")
            elif spec.type == "string":
                if not isinstance(value, str):
                    raise ArgumentError(f"argument {name!r} must be a string")
            elif spec.type == "box":
                if not (isinstance(value, (list, tuple)) and len(value) == 4
                        and all(isinstance(v, int) for v in value)):
                    raise ArgumentError(f"argument {name!r} must be [xmin, ymin, xmax, ymax]")
            elif spec.type == "image":
                if not isinstance(value, (str, dict, RasterImage)):
                    raise ArgumentError(
                        f"argument {name!r} must be an image handle, inline PNG, or kb ref")
            out[name] = value
        return out


class ToolContext:
    """Execution context: image resolution plus an artifact sink."""

    def __init__(self, kb, state=None, turn: int = 0):
        self.kb = kb
        self.state = state
        self.turn = turn
        self._counter = 0

    def resolve_image(self, value) -> RasterImage:
        if isinstance(value, RasterImage):
            return value
        if isinstance(value, str):
            if self.state is not None:
                artifact = self.state.get_artifact(value)
                if artifact is not None and artifact.kind == "image":
                    return artifact.payload
            raise ArgumentError(f"unknown image handle {value!r}")
        if isinstance(value, dict):
            if "png_base64" in value:
                return RasterImage.from_base64_png(value["png_base64"])
            if "kb_image" in value:
                image = self.kb.images.get(value["kb_image"])
                if image is None:
                    raise ArgumentError(f"unknown kb image {value['kb_image']!r}")
                return image
        raise ArgumentError("image argument must be a handle, png_base64, or kb_image")

    def store_image(self, call_id: str, image: RasterImage, label: str, **meta) -> str | None:
        """Record an image artifact when running inside a session."""
        if self.state is None:
            return None
        self._counter += 1
        handle = f"art-{self.turn}-{call_id}-{label}-{self._counter}"
        self.state.put_artifact(
            handle, "image", image,
            order=self.turn * 10_000 + self._counter, source_call=call_id, **meta)
        return handle


ToolImpl = Callable[[dict, ToolContext, str], dict]


@dataclass
class CatalogEntry:
    spec: ToolSpec
    impl: ToolImpl


def build_catalog(kb) -> dict[str, CatalogEntry]:
    """All tools bound to one immutable snapshot; names are unique."""

    def t_classify_modality(args, ctx, call_id):
        image = ctx.resolve_image(args["image"])
        modality, confidence = classify_modality(image)
        return {"modality": modality.value, "confidence": confidence}

    def t_detect_characters(args, ctx, call_id):
        image = ctx.resolve_image(args["image"])
        detections = detect_characters(image)
        out = []
        for i, det in enumerate(detections):
            crop_handle = ctx.store_image(
                call_id, image.crop(det.bbox), f"crop{i}",
                modality="single-crop", bbox=list(det.bbox.as_tuple()))
            entry = {"bbox": list(det.bbox.as_tuple()), "score": det.score}
            if crop_handle:
                entry["crop_handle"] = crop_handle
            out.append(entry)
        return {"detections": out, "count": len(out)}

    def t_denoise_character(args, ctx, call_id):
        image = ctx.resolve_image(args["image"])
        cleaned = denoise_character(image)
        handle = ctx.store_image(call_id, cleaned, "denoised", modality="single-facsimile")
        data = {"png_base64": cleaned.to_base64_png(),
                "width": cleaned.width, "height": cleaned.height}
        if handle:
            data["result_handle"] = handle
        return data

    def t_generate_facsimile(args, ctx, call_id):
        image = ctx.resolve_image(args["image"])
        fax = generate_facsimile(image)
        handle = ctx.store_image(call_id, fax, "facsimile", modality="whole-facsimile")
        data = {"png_base64": fax.to_base64_png(), "width": fax.width, "height": fax.height}
        if handle:
            data["result_handle"] = handle
        return data

    def t_retrieve_glyphs(args, ctx, call_id):
        image = ctx.resolve_image(args["image"])
        index = (kb.indexes.standard_index if args["index"] == "standards"
                 else kb.indexes.glyph_index)
        hits = index.search(encode_image(image), args["k"])
        return {
            "hits": [
                {"target_id": h.target_id, "score": h.score, "rank": h.rank, **h.payload}
                for h in hits
            ]
        }

    def t_classify_glyph(args, ctx, call_id):
        image = ctx.resolve_image(args["image"])
        winner, ranked = classify_glyph(image, kb.indexes.standard_index)
        return {"class_id": winner, "classes": [[c, s] for c, s in ranked]}

    def t_retrieve_rubbings(args, ctx, call_id):
        image = ctx.resolve_image(args["image"])
        hits = retrieve_rubbings(image, kb, args["k"])
        return {
            "hits": [
                {"target_id": h.target_id, "score": h.score, "rank": h.rank, **h.payload}
                for h in hits
            ]
        }

    def t_retrieve_texts(args, ctx, call_id):
        hits = retrieve_texts(kb.indexes.text_index, args["query"], args["k"])
        return {
            "hits": [
                {"chunk_id": h.chunk_id, "score": h.score, "rank": h.rank,
                 "snippet": h.snippet, "kind": h.kind, "source_ref": h.source_ref}
                for h in hits
            ]
        }

    def t_interpret_fragment(args, ctx, call_id):
        pairs = interpret_fragment(kb, args["fragment_id"])
        return {
            "pairs": [
                {"instance_id": char.instance_id, "reading_index": char.reading_index,
                 "reading": reading, "readable": reading != UNREADABLE}
                for char, reading in pairs
            ]
        }

    def t_lookup_dictionary(args, ctx, call_id):
        entries = lookup_dictionary(kb, args["class_id"])
        return {"class_id": args["class_id"], "entries": [[s, t] for s, t in entries]}

    def t_lookup_fragment(args, ctx, call_id):
        bundle = kb.lookup_fragment(args["fragment_id"])
        return {
            "fragment_id": bundle.fragment_id,
            "rubbing": bundle.rubbing.to_dict() if bundle.rubbing else None,
            "facsimile": bundle.facsimile.to_dict() if bundle.facsimile else None,
            "characters": [c.to_dict() for c in bundle.characters],
            "interpretations": [r.to_dict() for r in bundle.interpretations],
            "document_chunks": [c.to_dict() for c in bundle.document_chunks],
        }

    image_param = {"image": ParamSpec("image")}
    entries = [
        CatalogEntry(
            ToolSpec("classify_modality",
                     "Classify an image into whole/single rubbing/facsimile.",
                     dict(image_param), ("modality", "confidence"),
                     {"image": {"kb_image": "example.png"}}),
            t_classify_modality),
        CatalogEntry(
            ToolSpec("detect_characters",
                     "Localize character boxes on a whole rubbing or facsimile.",
                     dict(image_param), ("detections", "count"),
                     {"image": {"kb_image": "example.png"}}),
            t_detect_characters),
        CatalogEntry(
            ToolSpec("denoise_character",
                     "Clean a single-character rubbing crop into facsimile form.",
                     dict(image_param), ("png_base64", "width", "height"),
                     {"image": {"kb_image": "example.png"}}),
            t_denoise_character),
        CatalogEntry(
            ToolSpec("generate_facsimile",
                     "Generate a whole facsimile image from a whole rubbing.",
                     dict(image_param), ("png_base64", "width", "height"),
                     {"image": {"kb_image": "example.png"}}),
            t_generate_facsimile),
        CatalogEntry(
            ToolSpec("retrieve_glyphs",
                     "Rank similar glyphs from the instance or standard index.",
                     {**image_param,
                      "k": ParamSpec("int", required=False, default=5),
                      "index": ParamSpec("string", required=False, default="instances")},
                     ("hits",),
                     {"image": {"kb_image": "example.png"}, "k": 5, "index": "standards"}),
            t_retrieve_glyphs),
        CatalogEntry(
            ToolSpec("classify_glyph",
                     "Assign a glyph class by majority vote over retrieved standards.",
                     dict(image_param), ("class_id", "classes"),
                     {"image": {"kb_image": "example.png"}}),
            t_classify_glyph),
        CatalogEntry(
            ToolSpec("retrieve_rubbings",
                     "Rank whole rubbings by similarity; hits carry interpretations.",
                     {**image_param, "k": ParamSpec("int", required=False, default=3)},
                     ("hits",),
                     {"image": {"kb_image": "example.png"}, "k": 3}),
            t_retrieve_rubbings),
        CatalogEntry(
            ToolSpec("retrieve_texts",
                     "BM25 search over interpretations, documents, and dictionary.",
                     {"query": ParamSpec("string"),
                      "k": ParamSpec("int", required=False, default=5)},
                     ("hits",),
                     {"query": "token-C00", "k": 5}),
            t_retrieve_texts),
        CatalogEntry(
            ToolSpec("interpret_fragment",
                     "Align a fragment's characters with modern readings.",
                     {"fragment_id": ParamSpec("string")}, ("pairs",),
                     {"fragment_id": "synth-0000"}),
            t_interpret_fragment),
        CatalogEntry(
            ToolSpec("lookup_dictionary",
                     "All scholarly dictionary entries for a glyph class.",
                     {"class_id": ParamSpec("string")}, ("class_id", "entries"),
                     {"class_id": "C00"}),
            t_lookup_dictionary),
        CatalogEntry(
            ToolSpec("lookup_fragment",
                     "Full cross-referenced bundle for one fragment id.",
                     {"fragment_id": ParamSpec("string")},
                     ("fragment_id", "characters", "interpretations"),
                     {"fragment_id": "synth-0000"}),
            t_lookup_fragment),
    ]
    catalog = {}
    for entry in entries:
        if entry.spec.name in catalog:
            raise ArgumentError(f"duplicate tool name {entry.spec.name}")
        catalog[entry.spec.name] = entry
    return catalog


def dispatch_tool(request: dict, catalog: dict[str, CatalogEntry], ctx: ToolContext) -> dict:
    """Execute one wire-format request; errors become error responses."""
    call_id = str(request.get("call_id", ""))
    name = request.get("tool")
    entry = catalog.get(name)
    if entry is None:
        return {"call_id": call_id, "status": "error", "data": {},
                "error": f"tool_not_found: {name!r}"}
    try:
        args = entry.spec.validate_args(request.get("args") or {})
        data = entry.impl(args, ctx, call_id)
        return {"call_id": call_id, "status": "ok", "data": data}
    except NotFoundError as exc:
        return {"call_id": call_id, "status": "error", "data": {}, "error": f"not_found: {exc}"}
    except ArgumentError as exc:
        return {"call_id": call_id, "status": "error", "data": {}, "error": f"invalid_argument: {exc}"}
    except ScriptoriumError as exc:
        return {"call_id": call_id, "status": "error", "data": {}, "error": f"{type(exc).__name__}: {exc}"}
