import numpy as np

from scriptorium.images import RasterImage
from scriptorium.kb.records import Modality
from scriptorium.synth.config import CROP_MARGIN, SynthConfig, derive_seed
from scriptorium.synth.corpus import class_ids
from scriptorium.synth.fragments import render_fragment, render_rubbing
from scriptorium.vision.modality import classify_modality

CFG = SynthConfig(master_seed=13, n_classes=8, n_fragments=4, noise="low")
CLASSES = class_ids(CFG)


def _sample_set():
    samples = []
    for i in range(5):
        fax, truth = render_fragment(CFG, f"mod-{i}", 4, CLASSES)
        rub = render_rubbing(fax, "low", derive_seed(13, "noise", i))
        samples.append((rub, Modality.WHOLE_RUBBING))
        samples.append((fax, Modality.WHOLE_FACSIMILE))
        for ann in truth.chars[:2]:
            box = ann.bbox.expand(CROP_MARGIN, rub.width, rub.height)
            samples.append((rub.crop(box), Modality.SINGLE_RUBBING))
            samples.append((fax.crop(box), Modality.SINGLE_FACSIMILE))
    return samples


def test_generator_labels_recovered():
    for image, expected in _sample_set():
        got, confidence = classify_modality(image)
        assert got == expected
        assert 0.0 <= confidence <= 1.0


def test_mid_gray_low_confidence():
    flat = RasterImage(np.full((64, 64), 128, dtype=np.uint8))
    modality, confidence = classify_modality(flat)
    assert modality in Modality
    assert confidence <= 0.5


def test_blank_images_classify_without_error():
    for value in (0, 255):
        modality, confidence = classify_modality(RasterImage.blank(48, 48, value=value))
        assert modality in Modality
        assert confidence <= 1.0
