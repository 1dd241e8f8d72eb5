"""Desk-scale evaluation metrics.

Every metric here has an independent brute-force twin in the test suite;
definitions below are the single source of truth for both.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Sequence

import numpy as np

from ..errors import ArgumentError
from ..images import BoundingBox, RasterImage, box_iou


def recall_at_k(ranked: Sequence[str], relevant: set[str], k: int) -> float:
    if not relevant:
        raise ArgumentError("recall undefined for empty relevance set")
    hits = sum(1 for t in ranked[:k] if t in relevant)
    return hits / len(relevant)


def average_precision_at(ranked: Sequence[str], relevant: set[str], cutoff: int) -> float:
    """Mean precision-at-hit over relevant ranks <= cutoff, divided by
    min(|relevant|, cutoff). Zero cutoff scores 0."""
    if not relevant:
        raise ArgumentError("AP undefined for empty relevance set")
    if cutoff <= 0:
        return 0.0
    total = 0.0
    seen_rel = 0
    for i, target in enumerate(ranked[:cutoff], start=1):
        if target in relevant:
            seen_rel += 1
            total += seen_rel / i
    return total / min(len(relevant), cutoff)


def metric_retrieval(
    ranked_lists: Sequence[Sequence[str]],
    relevance: Sequence[set[str]],
    k_set: Iterable[int] = (1, 3, 5),
    yes_rankings: Sequence[tuple[Sequence[str], int]] | None = None,
) -> dict:
    """Recall@k (mean over queries), mAP@5, and optionally mAP@|Yes|.

    `yes_rankings` supplies, per query, the candidate ranking by asserted
    yes-confidence together with the number of candidates the model
    answered "yes" to; the AP cutoff for that query is that yes count.
    Queries with an empty relevance set are excluded and counted.
    """
    if len(ranked_lists) != len(relevance):
        raise ArgumentError("ranked lists and relevance must align")
    keep = [i for i, rel in enumerate(relevance) if rel]
    excluded = len(relevance) - len(keep)
    result: dict = {"queries": len(keep), "excluded_empty_relevance": excluded}
    if not keep:
        return result
    for k in sorted(k_set):
        result[f"recall@{k}"] = float(
            np.mean([recall_at_k(ranked_lists[i], relevance[i], k) for i in keep])
        )
    result["map@5"] = float(
        np.mean([average_precision_at(ranked_lists[i], relevance[i], 5) for i in keep])
    )
    if yes_rankings is not None:
        if len(yes_rankings) != len(relevance):
            raise ArgumentError("yes rankings and relevance must align")
        result["map@yes"] = float(
            np.mean(
                [
                    average_precision_at(yes_rankings[i][0], relevance[i], yes_rankings[i][1])
                    for i in keep
                ]
            )
        )
    return result


def metric_mre(gt_counts: Sequence[int], pred_counts: Sequence[int]) -> dict:
    """Mean relative counting error: mean_i |gt_i - pred_i| / gt_i.

    Images with a zero ground-truth count cannot be scored (division by
    zero); they are excluded and reported.
    """
    if len(gt_counts) != len(pred_counts):
        raise ArgumentError("count lists must have equal length")
    errors = []
    excluded = 0
    for gt, pred in zip(gt_counts, pred_counts):
        if gt < 1:
            excluded += 1
            continue
        errors.append(abs(gt - pred) / gt)
    value = float(np.mean(errors)) if errors else 0.0
    return {"mre": value, "scored": len(errors), "excluded_zero_gt": excluded}


def metric_miou(gt_boxes: Sequence[BoundingBox], pred_boxes: Sequence[BoundingBox]) -> float:
    """Greedy one-to-one box matching by descending IoU; unmatched boxes
    contribute 0; mean over max(|gt|, |pred|). Empty vs empty is 1.0."""
    if not gt_boxes and not pred_boxes:
        return 1.0
    if not gt_boxes or not pred_boxes:
        return 0.0
    pairs = sorted(
        (
            (box_iou(g, p), gi, pi)
            for gi, g in enumerate(gt_boxes)
            for pi, p in enumerate(pred_boxes)
        ),
        key=lambda t: (-t[0], t[1], t[2]),
    )
    used_g: set[int] = set()
    used_p: set[int] = set()
    total = 0.0
    for iou, gi, pi in pairs:
        if iou <= 0.0:
            break
        if gi in used_g or pi in used_p:
            continue
        used_g.add(gi)
        used_p.add(pi)
        total += iou
    return total / max(len(gt_boxes), len(pred_boxes))


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean; defined as 0 when precision = recall = 0."""
    if precision == 0.0 and recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def metric_prf_coverage(
    pred_instances: Sequence[str],
    real_instances: Sequence[str],
    pred_categories: set[str] | None = None,
    real_categories: set[str] | None = None,
) -> dict:
    """Instance-level precision/recall/F1 plus category coverage.

    Instances are multisets: TP counts per-item overlap with multiplicity.
    Coverage is |pred cats intersect real cats| / |real cats|, presence
    only (a category hit many times still counts once).
    """
    pred_categories = set(pred_instances) if pred_categories is None else pred_categories
    real_categories = set(real_instances) if real_categories is None else real_categories
    if not real_categories:
        raise ArgumentError("coverage undefined for empty real category set")
    pred_c, real_c = Counter(pred_instances), Counter(real_instances)
    tp = sum(min(pred_c[key], real_c[key]) for key in pred_c)
    fp = sum(pred_c.values()) - tp
    fn = sum(real_c.values()) - tp
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return {
        "precision": precision,
        "recall": recall,
        "f1": f1_score(precision, recall),
        "coverage": len(pred_categories & real_categories) / len(real_categories),
    }


SSIM_WINDOW = 8
SSIM_C1 = (0.01 * 255) ** 2
SSIM_C2 = (0.03 * 255) ** 2


def metric_ssim(a: RasterImage, b: RasterImage) -> float:
    """Structural similarity, mean over non-overlapping 8x8 windows.

    Trailing partial windows are included. Constant equal images score 1.0
    (the stabilizing constants make the zero-variance case well defined).
    """
    if (a.width, a.height) != (b.width, b.height):
        raise ArgumentError(
            f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    pa = a.pixels.astype(np.float64)
    pb = b.pixels.astype(np.float64)
    values = []
    for y in range(0, a.height, SSIM_WINDOW):
        for x in range(0, a.width, SSIM_WINDOW):
            wa = pa[y:y + SSIM_WINDOW, x:x + SSIM_WINDOW]
            wb = pb[y:y + SSIM_WINDOW, x:x + SSIM_WINDOW]
            mu_a, mu_b = wa.mean(), wb.mean()
            var_a, var_b = wa.var(), wb.var()
            cov = ((wa - mu_a) * (wb - mu_b)).mean()
            values.append(
                ((2 * mu_a * mu_b + SSIM_C1) * (2 * cov + SSIM_C2))
                / ((mu_a**2 + mu_b**2 + SSIM_C1) * (var_a + var_b + SSIM_C2))
            )
    return float(np.mean(values))


ACCURACY_MODES = ("acc", "acc@1", "acc@5", "macro-precision", "macro-recall")


def metric_accuracy(predicted: Sequence, truth: Sequence, mode: str = "acc") -> float:
    """Label accuracy family.

    acc: predicted labels vs truth labels. acc@k: predicted is a ranked
    label list per item; correct when truth appears in the top k.
    macro-precision / macro-recall: one-vs-rest averages over the classes
    present in the truth (the four modalities, in the modality task).
    """
    if mode not in ACCURACY_MODES:
        raise ArgumentError(f"unknown accuracy mode {mode!r}")
    if len(predicted) != len(truth):
        raise ArgumentError("prediction and truth lists must align")
    if not truth:
        return 0.0
    if mode == "acc":
        return sum(1 for p, t in zip(predicted, truth) if p == t) / len(truth)
    if mode in ("acc@1", "acc@5"):
        k = 1 if mode == "acc@1" else 5
        return sum(1 for ranked, t in zip(predicted, truth) if t in list(ranked)[:k]) / len(truth)
    classes = sorted(set(truth))
    per_class = []
    for cls in classes:
        tp = sum(1 for p, t in zip(predicted, truth) if p == cls and t == cls)
        if mode == "macro-precision":
            denom = sum(1 for p in predicted if p == cls)
        else:
            denom = sum(1 for t in truth if t == cls)
        per_class.append(tp / denom if denom else 0.0)
    return float(np.mean(per_class))
