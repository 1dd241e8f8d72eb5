"""Pluggable external-model clients replace the deterministic pipelines
without engine changes; outputs stay bound to the same contracts."""

import numpy as np
import pytest

from scriptorium.errors import ArgumentError
from scriptorium.images import RasterImage
from scriptorium.kb.records import Modality
from scriptorium.synth.glyphs import standard_glyph_image
from scriptorium.text.index import IndexedChunk, index_texts, retrieve_texts
from scriptorium.vision.cleanup import denoise_character, generate_facsimile
from scriptorium.vision.external import image_request
from scriptorium.vision.modality import classify_modality
from scriptorium.vision.segmentation import detect_characters


class StubClient:
    def __init__(self, response):
        self.response = response
        self.requests = []

    def infer(self, request):
        self.requests.append(request)
        return self.response


def test_image_request_shape():
    img = RasterImage.blank(8, 8)
    request = image_request("do a thing", img, img)
    assert request["instruction"] == "do a thing"
    assert len(request["images"]) == 2
    assert "png_base64" in request["images"][0]


def test_detector_client_overrides_pipeline():
    blank = RasterImage.blank(100, 100)  # pipeline would find nothing
    client = StubClient({"detections": [
        {"bbox": [40, 10, 60, 30], "score": 0.7},
        {"bbox": [10, 10, 30, 30], "score": 0.9},
    ]})
    dets = detect_characters(blank, client=client)
    assert [(d.bbox.as_tuple(), d.score) for d in dets] == [
        ((10, 10, 30, 30), 0.9), ((40, 10, 60, 30), 0.7)]  # sorted (ymin, xmin)
    assert client.requests[0]["instruction"] == "detect characters"


def test_detector_client_bounds_checked():
    blank = RasterImage.blank(20, 20)
    client = StubClient({"detections": [{"bbox": [0, 0, 64, 64], "score": 0.5}]})
    with pytest.raises(ArgumentError):
        detect_characters(blank, client=client)
    with pytest.raises(ArgumentError):
        detect_characters(blank, client=StubClient({"detections": [
            {"bbox": [0, 0, 4, 4], "score": 1.5}]}))


def test_denoise_client_round_trip():
    canned = standard_glyph_image(7, "C02", 0)
    client = StubClient({"image": {"png_base64": canned.to_base64_png()}})
    out = denoise_character(RasterImage.blank(32, 32), client=client)
    assert out.same_pixels(canned)


def test_denoise_client_bad_payload():
    with pytest.raises(ArgumentError):
        denoise_character(RasterImage.blank(8, 8), client=StubClient({"nope": 1}))


def test_facsimile_client_dimension_contract():
    rubbing = RasterImage.blank(40, 30, value=0)
    good = RasterImage.blank(40, 30)
    out = generate_facsimile(rubbing, client=StubClient(
        {"image": {"png_base64": good.to_base64_png()}}))
    assert out.same_pixels(good)
    wrong = RasterImage.blank(10, 10)
    with pytest.raises(ArgumentError):
        generate_facsimile(rubbing, client=StubClient(
            {"image": {"png_base64": wrong.to_base64_png()}}))


def test_modality_client_override():
    flat = RasterImage(np.full((32, 32), 128, dtype=np.uint8))
    modality, confidence = classify_modality(
        flat, client=StubClient({"modality": "single-facsimile", "confidence": 0.93}))
    assert modality == Modality.SINGLE_FACSIMILE
    assert confidence == pytest.approx(0.93)
    with pytest.raises(ArgumentError):
        classify_modality(flat, client=StubClient({"modality": "hologram"}))


class StubEmbedder:
    """Maps texts onto fixed vectors so the rescoring order is forced."""

    def __init__(self, table, dim=2):
        self.table = table
        self.dim = dim

    def infer(self, request):
        return {"vectors": [self.table[t] for t in request["texts"]]}


def test_embedding_client_rescores_lexical_topk():
    chunks = [
        IndexedChunk(chunk_id="c00", text="rain rain rain"),
        IndexedChunk(chunk_id="c01", text="rain once"),
    ]
    index = index_texts(chunks)
    # BM25 alone ranks c00 first
    assert [h.chunk_id for h in retrieve_texts(index, "rain", 2)] == ["c00", "c01"]
    embedder = StubEmbedder({
        "rain": [1.0, 0.0],
        "rain rain rain": [0.0, 1.0],   # orthogonal to the query
        "rain once": [1.0, 0.1],        # nearly parallel
    })
    rescored = retrieve_texts(index, "rain", 2, embedder=embedder)
    assert [h.chunk_id for h in rescored] == ["c01", "c00"]
    assert rescored[0].rank == 1


def test_embedding_client_misaligned_vectors_rejected():
    index = index_texts([IndexedChunk(chunk_id="c0", text="alpha")])

    class Broken:
        def infer(self, request):
            return {"vectors": [[1.0]]}  # one vector short

    with pytest.raises(ArgumentError):
        retrieve_texts(index, "alpha", 1, embedder=Broken())
