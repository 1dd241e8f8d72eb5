import numpy as np
import pytest

from scriptorium.bench.metrics import metric_ssim
from scriptorium.errors import ArgumentError, StateError
from scriptorium.images import RasterImage
from scriptorium.synth.config import CROP_MARGIN, SynthConfig, derive_seed
from scriptorium.synth.corpus import class_ids
from scriptorium.synth.fragments import render_fragment, render_rubbing
from scriptorium.synth.glyphs import standard_glyph_image
from scriptorium.vision.cleanup import denoise_character, generate_facsimile
from scriptorium.vision.descriptor import VisualDescriptor, encode_image
from scriptorium.vision.retrieval import DescriptorIndex, classify_glyph, retrieve_glyphs

from oracles import brute_cosine_ranking

CFG = SynthConfig(master_seed=17, n_classes=8, n_fragments=4, noise="low")
CLASSES = class_ids(CFG)


def _unit(vec):
    arr = np.asarray(vec, dtype=np.float64)
    arr = arr / np.linalg.norm(arr)
    full = np.zeros(320)
    full[: arr.size] = arr
    full = full / np.linalg.norm(full)
    return VisualDescriptor(values=tuple(full.tolist()))


def test_self_match_rank_one():
    index = DescriptorIndex()
    descs = {cid: encode_image(standard_glyph_image(17, cid, 0)) for cid in CLASSES}
    for cid, desc in descs.items():
        index.add(cid, desc)
    for cid, desc in descs.items():
        hits = retrieve_glyphs(desc, index, 1)
        assert hits[0].target_id == cid
        assert hits[0].score == pytest.approx(1.0, abs=1e-6)
        assert hits[0].rank == 1


def test_hand_computed_cosine_order():
    # three stored vectors with known cosines to the query: 0.9, 0.5, 0.1
    q = np.zeros(320)
    q[0] = 1.0
    def with_cos(c, seed):
        v = np.zeros(320)
        v[0] = c
        v[1 + seed] = np.sqrt(1 - c * c)
        return VisualDescriptor(values=tuple(v.tolist()))

    index = DescriptorIndex()
    index.add("high", with_cos(0.9, 0))
    index.add("mid", with_cos(0.5, 1))
    index.add("low", with_cos(0.1, 2))
    hits = retrieve_glyphs(VisualDescriptor(values=tuple(q.tolist())), index, 3)
    assert [h.target_id for h in hits] == ["high", "mid", "low"]
    assert [h.score for h in hits] == pytest.approx([0.9, 0.5, 0.1], abs=1e-9)


def test_truncation_and_bad_k():
    index = DescriptorIndex()
    for i in range(4):
        index.add(f"item-{i}", encode_image(standard_glyph_image(17, CLASSES[i], 0)))
    assert len(index.search(encode_image(standard_glyph_image(17, CLASSES[0], 0)), 10)) == 4
    with pytest.raises(ArgumentError):
        index.search(encode_image(standard_glyph_image(17, CLASSES[0], 0)), 0)
    with pytest.raises(StateError):
        DescriptorIndex().search(encode_image(standard_glyph_image(17, CLASSES[0], 0)), 1)


def test_ranking_matches_brute_force(kb):
    index = kb.indexes.glyph_index
    query = encode_image(kb.images[sorted(kb.images)[0]])
    hits = index.search(query, len(index))
    expected = brute_cosine_ranking(
        index.ids(), [row.tolist() for row in index.matrix()],
        list(query.as_array()))
    assert [h.target_id for h in hits] == [tid for tid, _ in expected]
    for hit, (_, score) in zip(hits, expected):
        assert hit.score == pytest.approx(score, abs=1e-9)


def test_ties_break_by_ascending_id():
    index = DescriptorIndex()
    same = _unit([1.0, 0.0])
    for tid in ("zeta", "alpha", "mid"):
        index.add(tid, same)
    hits = index.search(same, 3)
    assert [h.target_id for h in hits] == ["alpha", "mid", "zeta"]


def _standard_index(seed=17):
    index = DescriptorIndex()
    for cid in CLASSES:
        for variant in range(2):
            index.add(f"{cid}_{variant}",
                      encode_image(standard_glyph_image(seed, cid, variant)),
                      class_id=cid)
    return index


def test_classify_identical_standard():
    index = _standard_index()
    winner, ranked = classify_glyph(standard_glyph_image(17, "C03", 0), index)
    assert winner == "C03"
    assert ranked[0][0] == "C03"


def test_classify_noisy_crop_top5():
    index = _standard_index()
    fax, truth = render_fragment(CFG, "cls-a", 4, CLASSES)
    rub = render_rubbing(fax, "low", derive_seed(17, "noise", "cls-a"))
    for ann in truth.chars:
        crop = rub.crop(ann.bbox.expand(CROP_MARGIN, rub.width, rub.height))
        winner, ranked = classify_glyph(crop, index)
        assert ann.class_id in [cid for cid, _ in ranked][:5]


def test_classify_tie_break_by_best_score():
    # k=2 over two single-image classes forces a 1-1 vote tie; the class with
    # the higher best score must win even though its id sorts later
    index = DescriptorIndex()
    index.add("x_0", encode_image(standard_glyph_image(17, "C00", 0)), class_id="zzz")
    index.add("y_0", encode_image(standard_glyph_image(17, "C01", 0)), class_id="aaa")
    winner, ranked = classify_glyph(standard_glyph_image(17, "C00", 0), index, k=2)
    assert winner == "zzz"
    assert [cid for cid, _ in ranked] == ["zzz", "aaa"]


def test_classify_empty_index_errors():
    with pytest.raises(StateError):
        classify_glyph(standard_glyph_image(17, "C00", 0), DescriptorIndex())


def test_denoise_blank_crop():
    out = denoise_character(RasterImage.blank(40, 40))
    assert out.pixels.min() == 255


def test_denoise_noisy_crop_ssim():
    fax, truth = render_fragment(CFG, "dn-a", 4, CLASSES)
    rub = render_rubbing(fax, "low", derive_seed(17, "noise", "dn-a"))
    for ann in truth.chars:
        box = ann.bbox.expand(CROP_MARGIN, rub.width, rub.height)
        cleaned = denoise_character(rub.crop(box))
        assert metric_ssim(cleaned, fax.crop(box)) >= 0.6


def test_denoise_near_idempotent_on_clean():
    for cid in CLASSES[:4]:
        clean = standard_glyph_image(17, cid, 1)
        assert metric_ssim(denoise_character(clean), clean) >= 0.95


def test_facsimile_blank_rubbing():
    out = generate_facsimile(RasterImage.blank(96, 96, value=0))
    assert out.pixels.min() == 255
    assert (out.width, out.height) == (96, 96)


def test_facsimile_round_trip_ssim():
    fax, _ = render_fragment(CFG, "fx-a", 4, CLASSES)
    rub = render_rubbing(fax, "low", derive_seed(17, "noise", "fx-a"))
    out = generate_facsimile(rub)
    assert (out.width, out.height) == (rub.width, rub.height)
    assert metric_ssim(out, fax) >= 0.6
    # polarity: generated facsimile is light, the rubbing is dark
    assert out.mean_intensity() > rub.mean_intensity()


def test_retrieve_rubbings_contract(kb):
    frag_id = sorted(kb.rubbings)[0]
    image = kb.images[kb.rubbings[frag_id].image_ref]
    from scriptorium.vision.retrieval import retrieve_rubbings

    hits = retrieve_rubbings(image, kb, 3)
    assert hits[0].target_id == frag_id
    assert hits[0].score == pytest.approx(1.0, abs=1e-6)
    # every hit carries the fragment's interpretation records
    for hit in hits:
        assert len(hit.payload["interpretations"]) >= 1
