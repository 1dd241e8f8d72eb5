"""Rubbing-to-facsimile cleanup: single-character denoising and whole-image
facsimile composition."""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..images import RasterImage
from .descriptor import ink_mask
from .segmentation import _STRUCT8, detect_characters

DESPECKLE_FRACTION = 0.01  # components below 1% of crop area are debris


def denoise_character(crop: RasterImage, client=None) -> RasterImage:
    """Clean a single-character crop into facsimile form (dark on white).

    Polarity-invert as needed, binarize, remove components smaller than 1%
    of the crop area, then smooth strokes with a 3x3 open followed by a
    close. Blank crops come back blank white. A translation-model client,
    when given, replaces the pipeline.
    """
    if client is not None:
        from .external import decode_image_response, image_request

        return decode_image_response(
            client.infer(image_request("denoise single character", crop)))
    mask = ink_mask(crop)
    if mask.any():
        labels, n = ndimage.label(mask, structure=_STRUCT8)
        min_area = max(1, int(DESPECKLE_FRACTION * crop.width * crop.height))
        sizes = np.bincount(labels.ravel())
        keep = sizes >= min_area
        keep[0] = False
        mask = keep[labels]
        mask = ndimage.binary_opening(mask, structure=_STRUCT8, iterations=1)
        mask = ndimage.binary_closing(mask, structure=_STRUCT8, iterations=1)
    out = np.where(mask, 0, 255).astype(np.uint8)
    return RasterImage(out)


def generate_facsimile(rubbing: RasterImage, client=None) -> RasterImage:
    """Compose a whole facsimile: detect characters, denoise each crop, and
    paste the cleaned glyphs at their original positions on a white canvas
    of the same dimensions. No detections yields a blank white canvas.
    A generation-model client, when given, replaces the composition; its
    output must keep the input's dimensions."""
    if client is not None:
        from ..errors import ArgumentError
        from .external import decode_image_response, image_request

        out = decode_image_response(
            client.infer(image_request("generate whole facsimile", rubbing)))
        if (out.width, out.height) != (rubbing.width, rubbing.height):
            raise ArgumentError(
                f"external facsimile is {out.width}x{out.height}, "
                f"input is {rubbing.width}x{rubbing.height}")
        return out
    canvas = np.full((rubbing.height, rubbing.width), 255, dtype=np.uint8)
    for det in detect_characters(rubbing):
        cleaned = denoise_character(rubbing.crop(det.bbox))
        b = det.bbox
        np.minimum(canvas[b.ymin:b.ymax, b.xmin:b.xmax], cleaned.pixels,
                   out=canvas[b.ymin:b.ymax, b.xmin:b.xmax])
    return RasterImage(canvas)
