"""Rule-based image modality classification.

Two independent cues: ink polarity (median background intensity) decides
rubbing vs facsimile; ink structure decides single character vs whole
image. A crop of one character concentrates most of the ink in one
cluster that spans a large share of the canvas; on a whole fragment
every cluster is small relative to the canvas.
"""

from __future__ import annotations

import numpy as np

from ..images import RasterImage
from ..kb.records import Modality
from .descriptor import background_intensity, ink_mask
from .segmentation import MIN_CLUSTER_INK, character_clusters

SINGLE_INK_SHARE = 0.5    # dominant cluster must hold this share of all ink
SINGLE_EXTENT = 0.35      # ...and span this fraction of a canvas dimension


def classify_modality(image: RasterImage, client=None) -> tuple[Modality, float]:
    """Classify into the four modalities with a confidence in [0, 1].

    Degenerate inputs (flat, blank) still classify, at low confidence.
    A learned classifier client, when given, overrides the rules.
    """
    if client is not None:
        from ..errors import ArgumentError
        from .external import image_request

        response = client.infer(image_request("classify modality", image))
        try:
            modality = Modality(response["modality"])
        except (KeyError, ValueError) as exc:
            raise ArgumentError(f"external classifier returned no valid modality: {exc}")
        confidence = float(response.get("confidence", 0.0))
        return modality, min(1.0, max(0.0, confidence))
    background = background_intensity(image)
    is_rubbing = background < 128.0
    polarity_conf = min(1.0, abs(background - 128.0) / 127.0)

    mask = ink_mask(image)
    total_ink = int(mask.sum())
    clusters = [c for c in character_clusters(image) if c.ink >= MIN_CLUSTER_INK]

    if not clusters or total_ink == 0:
        is_single = False
        structure_conf = 0.0
    else:
        dominant = max(clusters, key=lambda c: (c.ink, -c.bbox.ymin, -c.bbox.xmin))
        ink_share = dominant.ink / total_ink
        extent = max(dominant.bbox.width / image.width,
                     dominant.bbox.height / image.height)
        is_single = ink_share >= SINGLE_INK_SHARE and extent >= SINGLE_EXTENT
        if is_single:
            structure_conf = min(1.0, ink_share * extent / (SINGLE_INK_SHARE * SINGLE_EXTENT) / 2)
        else:
            structure_conf = min(1.0, (1.0 - extent) * len(clusters) / 3.0)

    if is_rubbing:
        modality = Modality.SINGLE_RUBBING if is_single else Modality.WHOLE_RUBBING
    else:
        modality = Modality.SINGLE_FACSIMILE if is_single else Modality.WHOLE_FACSIMILE
    confidence = 0.5 * polarity_conf + 0.5 * structure_conf
    return modality, float(np.clip(confidence, 0.0, 1.0))
