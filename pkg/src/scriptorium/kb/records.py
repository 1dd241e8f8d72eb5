"""Domain records for the five cross-referenced knowledge stores.

Every record family keys on (or references) a fragment id, the catalog
identifier of one excavated piece. Ids and readings are opaque strings:
synthetic corpora use placeholder tokens and nothing here inspects them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..errors import ArgumentError
from ..images import BoundingBox


class StoreKind(str, Enum):
    """The five logical stores, mirroring the knowledge-base layout."""

    STANDARD_INDEX = "standard_index"   # glyph classes with reference images
    PAIRS = "pairs"                     # rubbings + facsimiles + character crops
    CORPUS = "corpus"                   # fragment interpretation texts
    DOCUMENTS = "documents"             # literature chunks
    DICTIONARY = "dictionary"           # per-class scholarly interpretations


class Modality(str, Enum):
    WHOLE_RUBBING = "whole-rubbing"
    WHOLE_FACSIMILE = "whole-facsimile"
    SINGLE_RUBBING = "single-rubbing"
    SINGLE_FACSIMILE = "single-facsimile"

    @property
    def is_whole(self) -> bool:
        return self in (Modality.WHOLE_RUBBING, Modality.WHOLE_FACSIMILE)


def _require_str(value, name: str) -> str:
    if not isinstance(value, str) or not value:
        raise ArgumentError(f"{name} must be a non-empty string, got {value!r}")
    return value


@dataclass(frozen=True)
class RubbingRecord:
    fragment_id: str
    image_ref: str
    provenance: str  # source catalog name + plate/page
    modality: str = Modality.WHOLE_RUBBING.value

    def to_dict(self) -> dict:
        return {
            "fragment_id": self.fragment_id,
            "image_ref": self.image_ref,
            "provenance": self.provenance,
            "modality": self.modality,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RubbingRecord":
        return cls(
            fragment_id=_require_str(d.get("fragment_id"), "fragment_id"),
            image_ref=_require_str(d.get("image_ref"), "image_ref"),
            provenance=_require_str(d.get("provenance"), "provenance"),
            modality=d.get("modality", Modality.WHOLE_RUBBING.value),
        )


@dataclass(frozen=True)
class FacsimileRecord:
    fragment_id: str
    image_ref: str
    paired_rubbing: str | None = None
    origin: str = "generated"  # "hand-drawn" | "generated"

    def to_dict(self) -> dict:
        return {
            "fragment_id": self.fragment_id,
            "image_ref": self.image_ref,
            "paired_rubbing": self.paired_rubbing,
            "origin": self.origin,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FacsimileRecord":
        origin = d.get("origin", "generated")
        if origin not in ("hand-drawn", "generated"):
            raise ArgumentError(f"facsimile origin must be hand-drawn|generated, got {origin!r}")
        return cls(
            fragment_id=_require_str(d.get("fragment_id"), "fragment_id"),
            image_ref=_require_str(d.get("image_ref"), "image_ref"),
            paired_rubbing=d.get("paired_rubbing"),
            origin=origin,
        )


@dataclass(frozen=True)
class CharacterInstance:
    instance_id: str
    fragment_id: str
    bbox: BoundingBox  # location on the fragment's rubbing image
    reading_index: int
    crop_ref: str
    glyph_class: str | None = None
    descriptor: tuple[float, ...] | None = None  # optional precomputed feature

    def to_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "fragment_id": self.fragment_id,
            "bbox": list(self.bbox.as_tuple()),
            "reading_index": self.reading_index,
            "crop_ref": self.crop_ref,
            "glyph_class": self.glyph_class,
            "descriptor": list(self.descriptor) if self.descriptor is not None else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CharacterInstance":
        idx = d.get("reading_index")
        if not isinstance(idx, int) or idx < 0:
            raise ArgumentError(f"reading_index must be a non-negative int, got {idx!r}")
        desc = d.get("descriptor")
        return cls(
            instance_id=_require_str(d.get("instance_id"), "instance_id"),
            fragment_id=_require_str(d.get("fragment_id"), "fragment_id"),
            bbox=BoundingBox.from_list(d.get("bbox") or []),
            reading_index=idx,
            crop_ref=_require_str(d.get("crop_ref"), "crop_ref"),
            glyph_class=d.get("glyph_class"),
            descriptor=tuple(desc) if desc is not None else None,
        )


@dataclass(frozen=True)
class GlyphClassEntry:
    class_id: str
    subclass_id: str
    modern_reading: str  # may be a placeholder token
    standard_image_refs: tuple[str, ...]

    def key(self) -> str:
        return f"{self.class_id}:{self.subclass_id}"

    def to_dict(self) -> dict:
        return {
            "class_id": self.class_id,
            "subclass_id": self.subclass_id,
            "modern_reading": self.modern_reading,
            "standard_image_refs": list(self.standard_image_refs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GlyphClassEntry":
        refs = d.get("standard_image_refs") or []
        if not refs:
            raise ArgumentError("glyph class needs at least one standard image")
        return cls(
            class_id=_require_str(d.get("class_id"), "class_id"),
            subclass_id=_require_str(d.get("subclass_id"), "subclass_id"),
            modern_reading=_require_str(d.get("modern_reading"), "modern_reading"),
            standard_image_refs=tuple(refs),
        )


@dataclass(frozen=True)
class InterpretationRecord:
    fragment_id: str
    text: str
    source: str
    aligned_readings: tuple[tuple[int, str], ...] | None = None

    def key(self) -> str:
        return f"{self.fragment_id}::{self.source}"

    def to_dict(self) -> dict:
        return {
            "fragment_id": self.fragment_id,
            "text": self.text,
            "source": self.source,
            "aligned_readings": (
                [[i, r] for i, r in self.aligned_readings]
                if self.aligned_readings is not None else None
            ),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InterpretationRecord":
        aligned = d.get("aligned_readings")
        parsed = None
        if aligned is not None:
            parsed = tuple((int(i), str(r)) for i, r in aligned)
        return cls(
            fragment_id=_require_str(d.get("fragment_id"), "fragment_id"),
            text=_require_str(d.get("text"), "text"),
            source=_require_str(d.get("source"), "source"),
            aligned_readings=parsed,
        )


@dataclass(frozen=True)
class DocumentChunk:
    doc_id: str
    chunk_id: str
    text: str
    linked_classes: tuple[str, ...] = ()
    image_refs: tuple[str, ...] = ()

    def key(self) -> str:
        return f"{self.doc_id}::{self.chunk_id}"

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "chunk_id": self.chunk_id,
            "text": self.text,
            "linked_classes": list(self.linked_classes),
            "image_refs": list(self.image_refs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DocumentChunk":
        return cls(
            doc_id=_require_str(d.get("doc_id"), "doc_id"),
            chunk_id=_require_str(d.get("chunk_id"), "chunk_id"),
            text=_require_str(d.get("text"), "text"),
            linked_classes=tuple(d.get("linked_classes") or ()),
            image_refs=tuple(d.get("image_refs") or ()),
        )


@dataclass(frozen=True)
class DictionaryEntry:
    class_id: str
    entries: tuple[tuple[str, str], ...]  # (scholar/source, interpretation)

    def to_dict(self) -> dict:
        return {"class_id": self.class_id, "entries": [[s, t] for s, t in self.entries]}

    @classmethod
    def from_dict(cls, d: dict) -> "DictionaryEntry":
        entries = tuple((str(s), str(t)) for s, t in (d.get("entries") or ()))
        if not entries:
            raise ArgumentError("dictionary entry needs at least one (source, text) pair")
        return cls(class_id=_require_str(d.get("class_id"), "class_id"), entries=entries)


# record family -> (store kind, dataclass); family names double as the
# on-disk jsonl file stems inside a snapshot directory.
RECORD_FAMILIES = {
    "glyph_classes": (StoreKind.STANDARD_INDEX, GlyphClassEntry),
    "rubbings": (StoreKind.PAIRS, RubbingRecord),
    "facsimiles": (StoreKind.PAIRS, FacsimileRecord),
    "characters": (StoreKind.PAIRS, CharacterInstance),
    "interpretations": (StoreKind.CORPUS, InterpretationRecord),
    "documents": (StoreKind.DOCUMENTS, DocumentChunk),
    "dictionary": (StoreKind.DICTIONARY, DictionaryEntry),
}
