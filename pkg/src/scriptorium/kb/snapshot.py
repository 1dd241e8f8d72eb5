"""The knowledge-base snapshot: ingestion, secondary indexes, persistence.

On-disk layout (one directory per snapshot):

    manifest.json            format version, store counts, per-file sha256
    stores/<family>.jsonl    one JSON record per line, sorted by primary key
    images/<path key>.png    grayscale PNGs addressed by their path key
    ground_truth.json        optional generator sidecar (checksummed too)

Snapshots are immutable once indexes are built; ingestion is single-writer.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import (
    ArgumentError,
    NotFoundError,
    SnapshotCorruptionError,
    StateError,
    UnsupportedFormatError,
)
from ..images import RasterImage
from ..text.index import IndexedChunk, TextIndex, index_texts
from ..vision.descriptor import encode_image
from ..vision.retrieval import DescriptorIndex
from .records import (
    RECORD_FAMILIES,
    CharacterInstance,
    DictionaryEntry,
    DocumentChunk,
    FacsimileRecord,
    GlyphClassEntry,
    InterpretationRecord,
    RubbingRecord,
    StoreKind,
)

FORMAT_VERSION = "1"

# ingestion order honoring cross-references between families
FAMILY_ORDER = (
    "glyph_classes",
    "rubbings",
    "facsimiles",
    "characters",
    "interpretations",
    "documents",
    "dictionary",
)


@dataclass
class RejectedRecord:
    family: str
    key: str
    reason: str

    def to_dict(self) -> dict:
        return {"family": self.family, "key": self.key, "reason": self.reason}


@dataclass
class IngestReport:
    accepted: int = 0
    rejected: list[RejectedRecord] = field(default_factory=list)

    @property
    def rejected_count(self) -> int:
        return len(self.rejected)

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": self.rejected_count,
            "reasons": [r.to_dict() for r in self.rejected],
        }


@dataclass
class FragmentBundle:
    fragment_id: str
    rubbing: RubbingRecord | None
    facsimile: FacsimileRecord | None
    characters: list[CharacterInstance]
    interpretations: list[InterpretationRecord]
    document_chunks: list[DocumentChunk]


@dataclass
class KbIndexes:
    fragment_ids: list[str] = field(default_factory=list)
    class_instances: dict[str, list[str]] = field(default_factory=dict)
    text_index: TextIndex = field(default_factory=TextIndex)
    glyph_index: DescriptorIndex = field(default_factory=DescriptorIndex)
    standard_index: DescriptorIndex = field(default_factory=DescriptorIndex)
    rubbing_index: DescriptorIndex = field(default_factory=DescriptorIndex)


class KbSnapshot:
    """Five cross-referenced stores plus images and secondary indexes."""

    def __init__(self):
        self.glyph_classes: dict[str, GlyphClassEntry] = {}   # "class:subclass"
        self.rubbings: dict[str, RubbingRecord] = {}          # fragment_id
        self.facsimiles: dict[str, FacsimileRecord] = {}      # fragment_id
        self.characters: dict[str, CharacterInstance] = {}    # instance_id
        self.interpretations: dict[str, InterpretationRecord] = {}  # frag::source
        self.documents: dict[str, DocumentChunk] = {}         # doc::chunk
        self.dictionary: dict[str, DictionaryEntry] = {}      # class_id
        self.images: dict[str, RasterImage] = {}
        self.ground_truth: dict | None = None
        self.indexes = KbIndexes()
        self._indexed = False
        self._writable = True

    # -- store plumbing ----------------------------------------------------

    def _family_map(self, family: str) -> dict:
        return {
            "glyph_classes": self.glyph_classes,
            "rubbings": self.rubbings,
            "facsimiles": self.facsimiles,
            "characters": self.characters,
            "interpretations": self.interpretations,
            "documents": self.documents,
            "dictionary": self.dictionary,
        }[family]

    def store_counts(self) -> dict[str, int]:
        return {family: len(self._family_map(family)) for family in FAMILY_ORDER}

    def kind_counts(self) -> dict[str, int]:
        """Record totals per logical store (the five-store view)."""
        totals: dict[str, int] = {kind.value: 0 for kind in StoreKind}
        for family in FAMILY_ORDER:
            kind = RECORD_FAMILIES[family][0]
            totals[kind.value] += len(self._family_map(family))
        return totals

    def class_exists(self, class_id: str) -> bool:
        return any(entry.class_id == class_id for entry in self.glyph_classes.values())

    def add_images(self, images: dict[str, RasterImage]):
        if not self._writable:
            raise StateError("snapshot is immutable after build_indexes")
        self.images.update(images)

    # -- validation --------------------------------------------------------

    def _record_key(self, family: str, record) -> str:
        if family in ("rubbings", "facsimiles"):
            return record.fragment_id
        if family == "characters":
            return record.instance_id
        if family == "dictionary":
            return record.class_id
        return record.key()

    def _validate(self, family: str, record) -> str | None:
        """Reason string when the record must be rejected, else None."""
        if family in ("rubbings", "facsimiles"):
            if record.image_ref not in self.images:
                return f"unreadable image {record.image_ref!r}"
        if family == "characters" and record.crop_ref not in self.images:
            return f"unreadable image {record.crop_ref!r}"
        if family == "rubbings" and not record.provenance:
            return "missing provenance"
        if family == "facsimiles" and record.paired_rubbing is not None:
            if record.paired_rubbing not in self.rubbings:
                return f"dangling paired_rubbing {record.paired_rubbing!r}"
        if family == "characters":
            rubbing = self.rubbings.get(record.fragment_id)
            if rubbing is None:
                return f"dangling fragment_id {record.fragment_id!r}"
            parent = self.images[rubbing.image_ref]
            if not record.bbox.within(parent.width, parent.height):
                return "bbox outside parent image bounds"
            if record.glyph_class is not None and not self.class_exists(record.glyph_class):
                return f"dangling glyph_class {record.glyph_class!r}"
            for other in self.characters.values():
                if (other.fragment_id == record.fragment_id
                        and other.reading_index == record.reading_index):
                    return f"duplicate reading_index {record.reading_index}"
        if family == "glyph_classes":
            for ref in record.standard_image_refs:
                if ref not in self.images:
                    return f"unreadable image {ref!r}"
        if family == "interpretations":
            if record.fragment_id not in self.rubbings:
                return f"dangling fragment_id {record.fragment_id!r}"
            if record.aligned_readings:
                indices = {
                    c.reading_index
                    for c in self.characters.values()
                    if c.fragment_id == record.fragment_id
                }
                missing = [i for i, _ in record.aligned_readings if i not in indices]
                if missing:
                    return f"aligned reading_index {missing[0]} not on fragment"
        if family == "documents":
            for cid in record.linked_classes:
                if not self.class_exists(cid):
                    return f"dangling glyph_class {cid!r}"
            for ref in record.image_refs:
                if ref not in self.images:
                    return f"unreadable image {ref!r}"
        if family == "dictionary":
            if not self.class_exists(record.class_id):
                return f"dangling glyph_class {record.class_id!r}"
        return None

    # -- ingestion ---------------------------------------------------------

    def ingest_store(self, family: str, records, images: dict[str, RasterImage] | None = None) -> IngestReport:
        """Validate and persist one record family.

        Invalid records never abort the run: each is reported with a
        machine-readable reason. Re-ingesting identical input leaves the
        stores (and so the manifest checksums) unchanged.
        """
        if family not in RECORD_FAMILIES:
            raise ArgumentError(f"unknown store family {family!r}")
        if not self._writable:
            raise StateError("snapshot is immutable after build_indexes")
        if images:
            self.add_images(images)
        report = IngestReport()
        store = self._family_map(family)
        record_cls = RECORD_FAMILIES[family][1]
        for record in records:
            if isinstance(record, dict):
                try:
                    record = record_cls.from_dict(record)
                except ArgumentError as exc:
                    report.rejected.append(RejectedRecord(family, str(record.get(
                        "instance_id") or record.get("fragment_id") or record.get(
                        "class_id") or record.get("chunk_id") or "?"), str(exc)))
                    continue
            key = self._record_key(family, record)
            if key in store:
                report.rejected.append(RejectedRecord(family, key, "duplicate primary key"))
                continue
            reason = self._validate(family, record)
            if reason is not None:
                report.rejected.append(RejectedRecord(family, key, reason))
                continue
            store[key] = record
            report.accepted += 1
        return report

    def ingest_payload(self, payload) -> dict[str, IngestReport]:
        """Ingest a full corpus payload in dependency order."""
        self.add_images(payload.images)
        if payload.ground_truth:
            self.ground_truth = payload.ground_truth
        return {
            family: self.ingest_store(family, payload.records(family))
            for family in FAMILY_ORDER
        }

    # -- secondary indexes ---------------------------------------------------

    def build_indexes(self) -> "KbSnapshot":
        """Populate lookup, text, and descriptor indexes; freezes the snapshot.

        Deterministic: records are visited in sorted key order, and
        descriptors are pure functions of the stored images.
        """
        idx = KbIndexes()
        idx.fragment_ids = sorted(
            set(self.rubbings) | set(self.facsimiles)
            | {c.fragment_id for c in self.characters.values()}
        )
        for key in sorted(self.characters):
            char = self.characters[key]
            if char.glyph_class is not None:
                idx.class_instances.setdefault(char.glyph_class, []).append(key)

        chunks = []
        for key in sorted(self.interpretations):
            rec = self.interpretations[key]
            chunks.append(IndexedChunk(
                chunk_id=f"interp::{key}", text=rec.text, kind="interpretation", source_ref=key))
        for key in sorted(self.documents):
            rec = self.documents[key]
            chunks.append(IndexedChunk(
                chunk_id=f"doc::{key}", text=rec.text, kind="document", source_ref=key))
        for key in sorted(self.dictionary):
            rec = self.dictionary[key]
            for i, (source, text) in enumerate(rec.entries):
                chunks.append(IndexedChunk(
                    chunk_id=f"dict::{key}::{i}", text=text, kind="dictionary",
                    source_ref=f"{key}::{source}"))
        idx.text_index = index_texts(chunks)

        for key in sorted(self.characters):
            char = self.characters[key]
            idx.glyph_index.add(
                key, encode_image(self.images[char.crop_ref]),
                fragment_id=char.fragment_id, class_id=char.glyph_class,
                crop_ref=char.crop_ref,
            )
        for key in sorted(self.glyph_classes):
            entry = self.glyph_classes[key]
            for ref in entry.standard_image_refs:
                idx.standard_index.add(
                    ref, encode_image(self.images[ref]),
                    class_id=entry.class_id, subclass_id=entry.subclass_id,
                )
        for key in sorted(self.rubbings):
            rec = self.rubbings[key]
            idx.rubbing_index.add(
                key, encode_image(self.images[rec.image_ref]), image_ref=rec.image_ref)

        self.indexes = idx
        self._indexed = True
        self._writable = False
        return self

    def index_checksums(self) -> dict[str, str]:
        """Stable digests of every secondary index, for determinism checks."""
        def digest(obj) -> str:
            return hashlib.sha256(
                json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
            ).hexdigest()

        text = self.indexes.text_index
        return {
            "fragments": digest(self.indexes.fragment_ids),
            "classes": digest(self.indexes.class_instances),
            "text": digest({
                "postings": {t: p for t, p in sorted(text.postings.items())},
                "lengths": text.chunk_len,
                "n_docs": text.n_docs,
                "avg_len": text.avg_len,
            }),
            "glyphs": digest(self.indexes.glyph_index.checksum_payload()),
            "standards": digest(self.indexes.standard_index.checksum_payload()),
            "rubbings": digest(self.indexes.rubbing_index.checksum_payload()),
        }

    # -- lookups -------------------------------------------------------------

    def lookup_fragment(self, fragment_id: str) -> FragmentBundle:
        """Every record referencing the fragment id; characters sorted by
        reading index; linked document chunks via shared glyph classes."""
        if not self._indexed:
            raise StateError("build_indexes must run before lookups")
        if fragment_id not in self.indexes.fragment_ids:
            raise NotFoundError(f"unknown fragment {fragment_id!r}")
        characters = sorted(
            (c for c in self.characters.values() if c.fragment_id == fragment_id),
            key=lambda c: c.reading_index,
        )
        classes = {c.glyph_class for c in characters if c.glyph_class}
        chunks = [
            self.documents[key]
            for key in sorted(self.documents)
            if classes & set(self.documents[key].linked_classes)
        ]
        return FragmentBundle(
            fragment_id=fragment_id,
            rubbing=self.rubbings.get(fragment_id),
            facsimile=self.facsimiles.get(fragment_id),
            characters=characters,
            interpretations=[
                self.interpretations[key]
                for key in sorted(self.interpretations)
                if self.interpretations[key].fragment_id == fragment_id
            ],
            document_chunks=chunks,
        )

    def verify_references(self) -> list[str]:
        """Resolve every cross-reference; returns failures (empty = healthy)."""
        failures = []
        for family in FAMILY_ORDER:
            for key, record in self._family_map(family).items():
                reason = self._validate_resolved(family, record)
                if reason:
                    failures.append(f"{family}/{key}: {reason}")
        return failures

    def _validate_resolved(self, family: str, record) -> str | None:
        if family == "rubbings":
            return None if record.image_ref in self.images else "missing image"
        if family == "facsimiles":
            if record.image_ref not in self.images:
                return "missing image"
            if record.paired_rubbing and record.paired_rubbing not in self.rubbings:
                return "missing paired rubbing"
        if family == "characters":
            if record.crop_ref not in self.images:
                return "missing crop image"
            if record.fragment_id not in self.rubbings:
                return "missing fragment"
            if record.glyph_class and not self.class_exists(record.glyph_class):
                return "missing glyph class"
        if family == "glyph_classes":
            missing = [r for r in record.standard_image_refs if r not in self.images]
            return f"missing standard image {missing[0]!r}" if missing else None
        if family == "interpretations":
            if record.fragment_id not in self.rubbings:
                return "missing fragment"
        if family == "documents":
            bad = [c for c in record.linked_classes if not self.class_exists(c)]
            return f"missing glyph class {bad[0]!r}" if bad else None
        if family == "dictionary":
            if not self.class_exists(record.class_id):
                return "missing glyph class"
        return None


# -- persistence -------------------------------------------------------------


def _file_sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def save_snapshot(snapshot: KbSnapshot, directory: str | Path) -> dict:
    """Serialize to the documented directory layout; returns the manifest."""
    root = Path(directory)
    (root / "stores").mkdir(parents=True, exist_ok=True)
    (root / "images").mkdir(parents=True, exist_ok=True)
    files: dict[str, dict] = {}

    for family in FAMILY_ORDER:
        store = snapshot._family_map(family)
        rel = f"stores/{family}.jsonl"
        path = root / rel
        lines = [
            json.dumps(store[key].to_dict(), sort_keys=True, separators=(",", ":"))
            for key in sorted(store)
        ]
        path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
        files[rel] = {"sha256": _file_sha256(path), "records": len(lines)}

    for ref in sorted(snapshot.images):
        rel = f"images/{ref}"
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(snapshot.images[ref].to_png_bytes())
        files[rel] = {"sha256": _file_sha256(path)}

    if snapshot.ground_truth is not None:
        path = root / "ground_truth.json"
        path.write_text(json.dumps(snapshot.ground_truth, sort_keys=True), encoding="utf-8")
        files["ground_truth.json"] = {"sha256": _file_sha256(path)}

    manifest = {
        "format_version": FORMAT_VERSION,
        "store_counts": snapshot.store_counts(),
        "kind_counts": snapshot.kind_counts(),
        "files": files,
    }
    (root / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2), encoding="utf-8"
    )
    return manifest


def load_snapshot(directory: str | Path) -> KbSnapshot:
    """Load and checksum-verify a snapshot directory (indexes not built)."""
    root = Path(directory)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise UnsupportedFormatError(f"{root} is not a snapshot (no manifest.json)")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UnsupportedFormatError(f"manifest.json unreadable: {exc}") from exc
    if manifest.get("format_version") != FORMAT_VERSION:
        raise UnsupportedFormatError(
            f"unsupported snapshot format {manifest.get('format_version')!r}"
        )

    for rel, meta in manifest.get("files", {}).items():
        path = root / rel
        if not path.is_file():
            raise SnapshotCorruptionError(f"missing file {rel}")
        if _file_sha256(path) != meta["sha256"]:
            raise SnapshotCorruptionError(f"checksum mismatch for {rel}")

    snapshot = KbSnapshot()
    for rel in manifest.get("files", {}):
        if rel.startswith("images/"):
            ref = rel[len("images/"):]
            snapshot.images[ref] = RasterImage.from_png_bytes((root / rel).read_bytes())

    for family in FAMILY_ORDER:
        rel = f"stores/{family}.jsonl"
        if rel not in manifest.get("files", {}):
            continue
        record_cls = RECORD_FAMILIES[family][1]
        store = snapshot._family_map(family)
        for line in (root / rel).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = record_cls.from_dict(json.loads(line))
            store[snapshot._record_key(family, record)] = record

    counts = snapshot.store_counts()
    if counts != manifest.get("store_counts"):
        raise SnapshotCorruptionError(
            f"manifest store counts {manifest.get('store_counts')} != actual {counts}"
        )

    gt_path = root / "ground_truth.json"
    if gt_path.is_file():
        snapshot.ground_truth = json.loads(gt_path.read_text(encoding="utf-8"))
    return snapshot
