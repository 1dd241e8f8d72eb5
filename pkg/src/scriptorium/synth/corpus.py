"""Full synthetic corpus: five ingestion-ready stores plus a ground-truth
sidecar that the benchmark harness treats as the oracle."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..images import RasterImage
from ..kb.records import (
    CharacterInstance,
    DictionaryEntry,
    DocumentChunk,
    FacsimileRecord,
    GlyphClassEntry,
    InterpretationRecord,
    Modality,
    RubbingRecord,
)
from .config import CROP_MARGIN, STANDARD_VARIANTS, SynthConfig, derive_seed, rng_for
from .fragments import reading_token, render_fragment, render_rubbing
from .glyphs import standard_glyph_image


@dataclass
class CorpusPayload:
    """Everything a snapshot ingests, plus the generator's ground truth."""

    stores: dict[str, list] = field(default_factory=dict)
    images: dict[str, RasterImage] = field(default_factory=dict)
    ground_truth: dict = field(default_factory=dict)

    def records(self, family: str) -> list:
        return self.stores.get(family, [])


def class_ids(config: SynthConfig) -> list[str]:
    return [f"C{i:02d}" for i in range(config.n_classes)]


def fragment_ids(config: SynthConfig) -> list[str]:
    return [f"synth-{i:04d}" for i in range(config.n_fragments)]


def generate_corpus(config: SynthConfig) -> CorpusPayload:
    """Deterministic corpus build; identical config -> identical payload."""
    payload = CorpusPayload()
    classes = class_ids(config)
    frags = fragment_ids(config)

    glyph_classes = []
    for cid in classes:
        refs = []
        for variant in range(STANDARD_VARIANTS):
            ref = f"standards/{cid}_{variant}.png"
            payload.images[ref] = standard_glyph_image(config.master_seed, cid, variant)
            refs.append(ref)
        glyph_classes.append(
            GlyphClassEntry(
                class_id=cid,
                subclass_id=f"{cid}.0",
                modern_reading=reading_token(cid),
                standard_image_refs=tuple(refs),
            )
        )

    rubbings, facsimiles, characters, interpretations = [], [], [], []
    gt_fragments: dict[str, dict] = {}
    modality_labels: dict[str, str] = {}
    occurrences: dict[str, dict[str, int]] = {cid: {} for cid in classes}

    for frag_id in frags:
        rng = rng_for(config.master_seed, "layout", frag_id)
        lo, hi = config.chars_per_fragment
        n_chars = int(rng.integers(lo, hi + 1))
        facsimile, truth = render_fragment(config, frag_id, n_chars, classes)
        rubbing = render_rubbing(
            facsimile, config.noise, derive_seed(config.master_seed, "noise", frag_id)
        )

        rub_ref = f"rubbings/{frag_id}.png"
        fax_ref = f"facsimiles/{frag_id}.png"
        payload.images[rub_ref] = rubbing
        payload.images[fax_ref] = facsimile
        modality_labels[rub_ref] = Modality.WHOLE_RUBBING.value
        modality_labels[fax_ref] = Modality.WHOLE_FACSIMILE.value

        rubbings.append(
            RubbingRecord(fragment_id=frag_id, image_ref=rub_ref,
                          provenance=f"synthetic catalog, plate {frag_id}")
        )
        facsimiles.append(
            FacsimileRecord(fragment_id=frag_id, image_ref=fax_ref,
                            paired_rubbing=frag_id, origin="generated")
        )

        gt_chars = []
        for ann in truth.chars:
            crop_box = ann.bbox.expand(CROP_MARGIN, rubbing.width, rubbing.height)
            crop_ref = f"crops/{frag_id}_{ann.reading_index:02d}.png"
            fax_crop_ref = f"crops-facsimile/{frag_id}_{ann.reading_index:02d}.png"
            payload.images[crop_ref] = rubbing.crop(crop_box)
            payload.images[fax_crop_ref] = facsimile.crop(crop_box)
            modality_labels[crop_ref] = Modality.SINGLE_RUBBING.value
            modality_labels[fax_crop_ref] = Modality.SINGLE_FACSIMILE.value

            instance_id = f"{frag_id}:{ann.reading_index:02d}"
            characters.append(
                CharacterInstance(
                    instance_id=instance_id,
                    fragment_id=frag_id,
                    bbox=ann.bbox,
                    reading_index=ann.reading_index,
                    crop_ref=crop_ref,
                    glyph_class=ann.class_id,
                )
            )
            occurrences[ann.class_id][frag_id] = occurrences[ann.class_id].get(frag_id, 0) + 1
            gt_chars.append(
                {
                    "instance_id": instance_id,
                    "reading_index": ann.reading_index,
                    "class_id": ann.class_id,
                    "bbox": list(ann.bbox.as_tuple()),
                    "crop_ref": crop_ref,
                    "facsimile_crop_ref": fax_crop_ref,
                }
            )

        aligned = tuple((c.reading_index, reading_token(c.class_id)) for c in truth.chars)
        interpretations.append(
            InterpretationRecord(
                fragment_id=frag_id,
                text=truth.interpretation,
                source=config.interpretation_sources[0],
                aligned_readings=aligned,
            )
        )
        if len(config.interpretation_sources) > 1 and truth.chars:
            # a second, terser interpretation from another source
            interpretations.append(
                InterpretationRecord(
                    fragment_id=frag_id,
                    text=f"inscription of {len(truth.chars)} characters: {truth.interpretation}",
                    source=config.interpretation_sources[1],
                    aligned_readings=None,
                )
            )

        gt_fragments[frag_id] = {
            "chars": gt_chars,
            "interpretation": truth.interpretation,
            "rubbing_ref": rub_ref,
            "facsimile_ref": fax_ref,
            "char_count": len(gt_chars),
        }

    documents = _make_documents(config, classes, frags, occurrences)
    dictionary = _make_dictionary(config, classes)

    payload.stores = {
        "glyph_classes": glyph_classes,
        "rubbings": rubbings,
        "facsimiles": facsimiles,
        "characters": characters,
        "interpretations": interpretations,
        "documents": documents,
        "dictionary": dictionary,
    }
    payload.ground_truth = {
        "config": {
            "master_seed": config.master_seed,
            "n_classes": config.n_classes,
            "n_fragments": config.n_fragments,
            "chars_per_fragment": list(config.chars_per_fragment),
            "canvas": list(config.canvas),
            "noise": config.noise,
            "n_documents": config.n_documents,
        },
        "fragments": gt_fragments,
        "modality_labels": modality_labels,
        "class_occurrences": occurrences,
    }
    return payload


def _make_documents(config, classes, frags, occurrences) -> list[DocumentChunk]:
    docs = []
    rng = rng_for(config.master_seed, "documents")
    for d in range(config.n_documents):
        doc_id = f"doc-{d:03d}"
        n_chunks = int(rng.integers(2, 5))
        for c in range(n_chunks):
            cid = classes[int(rng.integers(0, len(classes)))]
            hosting = sorted(occurrences[cid].keys())
            mentioned = hosting[: int(rng.integers(1, 4))] if hosting else []
            frag_note = (
                " attested on " + " ".join(mentioned) if mentioned
                else " with no attested fragment in this collection"
            )
            text = (
                f"study of {reading_token(cid)} reading and variant forms,"
                f"{frag_note}. plate notes section {d}.{c}"
            )
            docs.append(
                DocumentChunk(
                    doc_id=doc_id,
                    chunk_id=f"ch-{c:02d}",
                    text=text,
                    linked_classes=(cid,),
                    image_refs=(f"standards/{cid}_0.png",),
                )
            )
    return docs


def _make_dictionary(config, classes) -> list[DictionaryEntry]:
    entries = []
    rng = rng_for(config.master_seed, "dictionary")
    scholars = ("li", "wang", "chen", "zhao")
    for cid in classes:
        n = int(rng.integers(1, 4))
        pairs = tuple(
            (
                scholars[int(rng.integers(0, len(scholars)))] + f"-{k}",
                f"gloss of {reading_token(cid)}: sense {k}, attested usage notes",
            )
            for k in range(n)
        )
        entries.append(DictionaryEntry(class_id=cid, entries=pairs))
    return entries
