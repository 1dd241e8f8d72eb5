"""Measure the fixture statistics behind the frozen vision thresholds.

Prints intra/inter-class descriptor cosines, detection IoU/count quality
per noise level, denoise and round-trip SSIM distributions, and the
modality confusion count. Run after any change to the generator's noise
parameters or the descriptor layout, and refreeze thresholds accordingly.

Usage: python scripts/calibrate_vision.py [--fragments 30] [--seed 7]
"""

import argparse

import numpy as np

from scriptorium.bench.metrics import metric_ssim
from scriptorium.images import box_iou
from scriptorium.synth.config import CROP_MARGIN, STANDARD_VARIANTS, SynthConfig, derive_seed
from scriptorium.synth.corpus import class_ids
from scriptorium.synth.fragments import render_fragment, render_rubbing
from scriptorium.synth.glyphs import generate_glyph, standard_glyph_image
from scriptorium.vision.cleanup import denoise_character, generate_facsimile
from scriptorium.vision.descriptor import cosine_similarity, encode_image
from scriptorium.vision.modality import classify_modality
from scriptorium.vision.retrieval import DescriptorIndex, classify_glyph
from scriptorium.vision.segmentation import detect_characters


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--fragments", type=int, default=30)
    parser.add_argument("--classes", type=int, default=10)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    cfg = SynthConfig(master_seed=args.seed, n_classes=args.classes,
                      n_fragments=args.fragments, noise="low")
    classes = class_ids(cfg)

    intra = [
        cosine_similarity(encode_image(generate_glyph(args.seed, cid, s)),
                          encode_image(generate_glyph(args.seed, cid, s + 5)))
        for cid in classes for s in (1, 2, 3)
    ]
    inter = [
        cosine_similarity(encode_image(generate_glyph(args.seed, a, 1)),
                          encode_image(generate_glyph(args.seed, b, 1)))
        for i, a in enumerate(classes) for b in classes[i + 1:]
    ]
    print(f"descriptor cosine  intra: min {min(intra):.3f} mean {np.mean(intra):.3f}  "
          f"inter: max {max(inter):.3f} mean {np.mean(inter):.3f}")

    std = DescriptorIndex()
    for cid in classes:
        for v in range(STANDARD_VARIANTS):
            std.add(f"{cid}_{v}", encode_image(standard_glyph_image(args.seed, cid, v)),
                    class_id=cid)

    for level in ("none", "low", "high"):
        ious, count_diffs, den_ssims, rt_ssims = [], [], [], []
        top1 = top5 = n_cls = 0
        confusion = 0
        n_modality = 0
        for i in range(args.fragments):
            fid = f"cal-{i:04d}"
            fax, truth = render_fragment(cfg, fid, 3 + i % 4, classes)
            rub = render_rubbing(fax, level, derive_seed(args.seed, "cal", level, fid))
            dets = detect_characters(rub)
            count_diffs.append(len(dets) - len(truth.chars))
            for ann in truth.chars:
                ious.append(max((box_iou(ann.bbox, d.bbox) for d in dets), default=0.0))
                box = ann.bbox.expand(CROP_MARGIN, rub.width, rub.height)
                crop = rub.crop(box)
                den_ssims.append(metric_ssim(denoise_character(crop), fax.crop(box)))
                winner, ranked = classify_glyph(crop, std)
                n_cls += 1
                top1 += winner == ann.class_id
                top5 += ann.class_id in [c for c, _ in ranked][:5]
            rt_ssims.append(metric_ssim(generate_facsimile(rub), fax))
            for image, want in ((rub, "whole-rubbing"), (fax, "whole-facsimile")):
                n_modality += 1
                confusion += classify_modality(image)[0].value != want
        print(f"noise={level:<5} det count diff mean {np.mean(np.abs(count_diffs)):.2f} "
              f"IoU min {min(ious):.3f} | denoise SSIM min {min(den_ssims):.3f} "
              f"mean {np.mean(den_ssims):.3f} | roundtrip SSIM min {min(rt_ssims):.3f} | "
              f"classify top1 {top1 / n_cls:.2f} top5 {top5 / n_cls:.2f} | "
              f"modality errs {confusion}/{n_modality}")


if __name__ == "__main__":
    main()
