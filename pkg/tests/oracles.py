"""Independent brute-force twins of every shipped metric.

Deliberately naive: plain loops, no shared code with the package beyond
input types. The equivalence suite compares these against the real
implementations on randomized instances.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np


def brute_recall_at_k(ranked, relevant, k):
    found = 0
    for target in list(ranked)[:k]:
        if target in relevant:
            found += 1
    return found / len(relevant)


def brute_ap_at(ranked, relevant, cutoff):
    if cutoff <= 0:
        return 0.0
    precisions = []
    hits = 0
    for i, target in enumerate(list(ranked)[:cutoff], start=1):
        if target in relevant:
            hits += 1
            precisions.append(hits / i)
    denom = min(len(relevant), cutoff)
    return sum(precisions) / denom if denom else 0.0


def brute_mre(gt_counts, pred_counts):
    errs = []
    for gt, pred in zip(gt_counts, pred_counts):
        if gt >= 1:
            errs.append(abs(gt - pred) / gt)
    return sum(errs) / len(errs) if errs else 0.0


def brute_box_iou(a, b):
    ax0, ay0, ax1, ay1 = a
    bx0, by0, bx1, by1 = b
    iw = min(ax1, bx1) - max(ax0, bx0)
    ih = min(ay1, by1) - max(ay0, by0)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    area_a = (ax1 - ax0) * (ay1 - ay0)
    area_b = (bx1 - bx0) * (by1 - by0)
    return inter / (area_a + area_b - inter)


def brute_miou(gt_boxes, pred_boxes):
    gt = [tuple(b) for b in gt_boxes]
    pred = [tuple(b) for b in pred_boxes]
    if not gt and not pred:
        return 1.0
    if not gt or not pred:
        return 0.0
    pairs = []
    for gi, g in enumerate(gt):
        for pi, p in enumerate(pred):
            pairs.append((brute_box_iou(g, p), gi, pi))
    pairs.sort(key=lambda t: (-t[0], t[1], t[2]))
    used_g, used_p = set(), set()
    total = 0.0
    for iou, gi, pi in pairs:
        if iou <= 0:
            break
        if gi in used_g or pi in used_p:
            continue
        used_g.add(gi)
        used_p.add(pi)
        total += iou
    return total / max(len(gt), len(pred))


def brute_prf_coverage(pred_instances, real_instances, pred_cats=None, real_cats=None):
    pred_cats = set(pred_instances) if pred_cats is None else set(pred_cats)
    real_cats = set(real_instances) if real_cats is None else set(real_cats)
    pc, rc = Counter(pred_instances), Counter(real_instances)
    tp = 0
    for key in set(pc) | set(rc):
        tp += min(pc.get(key, 0), rc.get(key, 0))
    fp = sum(pc.values()) - tp
    fn = sum(rc.values()) - tp
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f1 = (2 * p * r / (p + r)) if (p or r) else 0.0
    cov = len(pred_cats & real_cats) / len(real_cats)
    return p, r, f1, cov


def brute_ssim(a, b, win=8):
    c1 = (0.01 * 255) ** 2
    c2 = (0.03 * 255) ** 2
    pa = np.asarray(a, dtype=np.float64)
    pb = np.asarray(b, dtype=np.float64)
    h, w = pa.shape
    vals = []
    for y in range(0, h, win):
        for x in range(0, w, win):
            wa = pa[y:y + win, x:x + win].ravel()
            wb = pb[y:y + win, x:x + win].ravel()
            n = wa.size
            mu_a = sum(wa) / n
            mu_b = sum(wb) / n
            var_a = sum((v - mu_a) ** 2 for v in wa) / n
            var_b = sum((v - mu_b) ** 2 for v in wb) / n
            cov = sum((va - mu_a) * (vb - mu_b) for va, vb in zip(wa, wb)) / n
            vals.append(((2 * mu_a * mu_b + c1) * (2 * cov + c2))
                        / ((mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2)))
    return sum(vals) / len(vals)


def brute_accuracy(predicted, truth, mode):
    n = len(truth)
    if mode == "acc":
        return sum(1 for p, t in zip(predicted, truth) if p == t) / n
    if mode in ("acc@1", "acc@5"):
        k = 1 if mode == "acc@1" else 5
        return sum(1 for ranked, t in zip(predicted, truth) if t in list(ranked)[:k]) / n
    classes = sorted(set(truth))
    scores = []
    for cls in classes:
        tp = sum(1 for p, t in zip(predicted, truth) if p == cls and t == cls)
        denom = (sum(1 for p in predicted if p == cls) if mode == "macro-precision"
                 else sum(1 for t in truth if t == cls))
        scores.append(tp / denom if denom else 0.0)
    return sum(scores) / len(scores)


def brute_bm25_ranking(index, query_terms, k1=1.2, b=0.75):
    """Score every chunk directly from the raw texts stored in the index."""
    n = index.n_docs
    scores = {}
    for chunk_id, chunk in index.chunks.items():
        from scriptorium.text.index import tokenize

        tokens = tokenize(chunk.text)
        length = len(tokens)
        total = 0.0
        for term in sorted(set(query_terms)):
            tf = tokens.count(term)
            if tf == 0:
                continue
            df = sum(
                1 for c in index.chunks.values() if term in tokenize(c.text)
            )
            idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
            total += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * length / index.avg_len))
        if total > 0:
            scores[chunk_id] = total
    return sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))


def brute_cosine_ranking(ids, vectors, query):
    scored = []
    for tid, vec in zip(ids, vectors):
        num = sum(a * b for a, b in zip(vec, query))
        scored.append((tid, num))
    return sorted(scored, key=lambda kv: (-kv[1], kv[0]))
