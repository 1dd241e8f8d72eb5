import numpy as np

from scriptorium.images import RasterImage, box_iou
from scriptorium.synth.config import SynthConfig, derive_seed
from scriptorium.synth.corpus import class_ids
from scriptorium.synth.fragments import render_fragment, render_rubbing
from scriptorium.vision.segmentation import detect_characters

CFG = SynthConfig(master_seed=11, n_classes=8, n_fragments=4, noise="low")
CLASSES = class_ids(CFG)


def test_blank_image_no_detections():
    assert detect_characters(RasterImage.blank(128, 128)) == []
    assert detect_characters(RasterImage.blank(128, 128, value=0)) == []


def test_noise_free_detection_exact():
    fax, truth = render_fragment(CFG, "det-a", 3, CLASSES)
    rubbing = render_rubbing(fax, "none", 1)
    detections = detect_characters(rubbing)
    assert len(detections) == 3
    for ann in truth.chars:
        best = max(box_iou(ann.bbox, d.bbox) for d in detections)
        assert best >= 0.9


def test_low_noise_count_within_one():
    for i in range(6):
        fax, truth = render_fragment(CFG, f"det-b{i}", 5, CLASSES)
        rubbing = render_rubbing(fax, "low", derive_seed(11, "noise", i))
        count = len(detect_characters(rubbing))
        assert abs(count - 5) <= 1


def test_boxes_inside_bounds_and_sorted():
    fax, _ = render_fragment(CFG, "det-c", 6, CLASSES)
    rubbing = render_rubbing(fax, "low", 3)
    detections = detect_characters(rubbing)
    keys = [(d.bbox.ymin, d.bbox.xmin) for d in detections]
    assert keys == sorted(keys)
    for d in detections:
        assert d.bbox.within(rubbing.width, rubbing.height)
        assert 0.0 <= d.score <= 1.0


def test_detection_deterministic():
    fax, _ = render_fragment(CFG, "det-d", 4, CLASSES)
    rubbing = render_rubbing(fax, "low", 9)
    a = detect_characters(rubbing)
    b = detect_characters(rubbing)
    assert [(d.bbox.as_tuple(), d.score) for d in a] == [(d.bbox.as_tuple(), d.score) for d in b]


def test_detection_works_on_facsimile_polarity():
    fax, truth = render_fragment(CFG, "det-e", 4, CLASSES)
    detections = detect_characters(fax)  # dark-on-light input, no inversion needed
    assert len(detections) == 4
    for ann in truth.chars:
        assert max(box_iou(ann.bbox, d.bbox) for d in detections) >= 0.9
