"""Character localization on whole rubbings/facsimiles.

Pipeline: polarity normalization -> Otsu binarization -> 3x3 morphological
close (1 iteration) -> connected components (8-connectivity) -> proximity
clustering, merging boxes whose separation is below 0.4x the median
component height -> drop clusters with too little ink to be a character.
Fully deterministic; output sorted by (ymin, xmin).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..images import BoundingBox, RasterImage
from .descriptor import ink_mask

MERGE_GAP_FACTOR = 0.4
MIN_CLUSTER_INK = 16        # pixels; rejects speckle debris, far below any glyph
SOLID_SCORE_AREA = 150.0    # ink pixels at which the confidence score saturates

_STRUCT8 = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class Detection:
    bbox: BoundingBox
    score: float  # in [0,1], monotone in ink mass of the cluster


@dataclass(frozen=True)
class _Component:
    bbox: BoundingBox
    ink: int


def _components(mask: np.ndarray) -> list[_Component]:
    labels, n = ndimage.label(mask, structure=_STRUCT8)
    comps = []
    for idx, sl in enumerate(ndimage.find_objects(labels), start=1):
        if sl is None:
            continue
        ys, xs = sl
        box = BoundingBox(xs.start, ys.start, xs.stop, ys.stop)
        ink = int((labels[sl] == idx).sum())
        comps.append(_Component(bbox=box, ink=ink))
    return comps


def _cluster(comps: list[_Component], gap: float) -> list[_Component]:
    """Union-find merge of components closer than `gap`, to a fixpoint."""
    parent = list(range(len(comps)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            if comps[i].bbox.gap_to(comps[j].bbox) < gap:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    merged: dict[int, _Component] = {}
    for i, comp in enumerate(comps):
        root = find(i)
        if root in merged:
            prev = merged[root]
            merged[root] = _Component(bbox=prev.bbox.union(comp.bbox), ink=prev.ink + comp.ink)
        else:
            merged[root] = comp
    return list(merged.values())


def character_clusters(image: RasterImage) -> list[_Component]:
    """Clustered candidate character regions, unfiltered by ink mass."""
    mask = ink_mask(image)
    if not mask.any():
        return []
    closed = ndimage.binary_closing(mask, structure=_STRUCT8, iterations=1)
    comps = _components(closed)
    if not comps:
        return []
    median_h = float(np.median([c.bbox.height for c in comps]))
    return _cluster(comps, MERGE_GAP_FACTOR * median_h)


def detect_characters(image: RasterImage, client=None) -> list[Detection]:
    """Character boxes on a whole image; blank input yields an empty list.

    A learned detector client, when given, replaces the deterministic
    pipeline; its boxes are bound-checked and sorted the same way."""
    if client is not None:
        from .external import decode_detections_response, image_request

        response = client.infer(image_request("detect characters", image))
        dets = [Detection(bbox=box, score=score)
                for box, score in decode_detections_response(
                    response, image.width, image.height)]
    else:
        clusters = [c for c in character_clusters(image) if c.ink >= MIN_CLUSTER_INK]
        dets = [
            Detection(bbox=c.bbox, score=min(1.0, c.ink / SOLID_SCORE_AREA))
            for c in clusters
        ]
    dets.sort(key=lambda d: (d.bbox.ymin, d.bbox.xmin))
    return dets
