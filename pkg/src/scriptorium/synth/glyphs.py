"""Seeded glyph shapes rendered as clean dark-on-white rasters.

A glyph class is a connected "skeleton" of 3-7 polyline strokes: every
stroke after the first starts on a point of an earlier stroke, which
guarantees the rendered glyph is a single connected ink component. That
keeps connected-component detection exact on noise-free fragments.
Variations jitter the control points by at most 5% of the canvas.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..images import RasterImage, ink_bbox
from .config import CROP_MARGIN, GLYPH_SIZE, STROKE_RADIUS, rng_for

VARIATION_JITTER = 0.05  # fraction of canvas, per control point


def class_archetype(master_seed: int, class_id: str) -> list[np.ndarray]:
    """Control polylines for one glyph class, in unit [0,1]^2 coordinates."""
    rng = rng_for(master_seed, "archetype", class_id)
    n_strokes = int(rng.integers(3, 8))
    strokes: list[np.ndarray] = []
    first = rng.uniform(0.12, 0.88, size=(int(rng.integers(2, 5)), 2))
    strokes.append(first)
    for _ in range(n_strokes - 1):
        host = strokes[int(rng.integers(0, len(strokes)))]
        anchor = host[int(rng.integers(0, len(host)))]
        pts = [anchor]
        for _ in range(int(rng.integers(1, 4))):
            pts.append(rng.uniform(0.12, 0.88, size=2))
        strokes.append(np.array(pts))
    return strokes


def vary_strokes(strokes: list[np.ndarray], master_seed: int, class_id: str,
                 variation_seed: int) -> list[np.ndarray]:
    if variation_seed == 0:
        return strokes  # variation 0 is the archetype itself (the "standard" form)
    rng = rng_for(master_seed, "variation", class_id, variation_seed)
    out = []
    for stroke in strokes:
        jitter = rng.uniform(-VARIATION_JITTER, VARIATION_JITTER, size=stroke.shape)
        out.append(np.clip(stroke + jitter, 0.02, 0.98))
    return out


def _stamp_disk(canvas: np.ndarray, cx: float, cy: float, radius: int):
    h, w = canvas.shape
    x0, x1 = max(0, int(cx) - radius), min(w, int(cx) + radius + 1)
    y0, y1 = max(0, int(cy) - radius), min(h, int(cy) + radius + 1)
    if x0 >= x1 or y0 >= y1:
        return
    ys, xs = np.mgrid[y0:y1, x0:x1]
    disk = (xs - cx) ** 2 + (ys - cy) ** 2 <= radius**2
    canvas[y0:y1, x0:x1][disk] = 0


def rasterize_strokes(strokes: list[np.ndarray], size: int,
                      radius: int = STROKE_RADIUS) -> RasterImage:
    """Paint strokes as ink (0) on white (255) by dense disk stamping.

    A final 3x3 morphological close regularizes the stamped boundary
    (disk stamping leaves 1-px notches), so downstream open/close stroke
    smoothing is a near-no-op on clean glyphs.
    """
    canvas = np.full((size, size), 255, dtype=np.uint8)
    scale = size - 1
    for stroke in strokes:
        pts = stroke * scale
        for a, b in zip(pts[:-1], pts[1:]):
            steps = max(2, int(np.ceil(np.hypot(*(b - a)) * 2)))
            for t in np.linspace(0.0, 1.0, steps):
                p = a + (b - a) * t
                _stamp_disk(canvas, p[0], p[1], radius)
    mask = ndimage.binary_closing(canvas == 0, structure=np.ones((3, 3), dtype=bool))
    return RasterImage(np.where(mask, 0, 255).astype(np.uint8))


def generate_glyph(master_seed: int, class_id: str, variation_seed: int,
                   size: int = GLYPH_SIZE) -> RasterImage:
    """Clean dark-on-white glyph render; deterministic in (class, seed)."""
    strokes = vary_strokes(class_archetype(master_seed, class_id),
                           master_seed, class_id, variation_seed)
    return rasterize_strokes(strokes, size)


def tight_crop(image: RasterImage, margin: int = CROP_MARGIN) -> RasterImage:
    """Crop to the ink extent plus a fixed margin (dark-on-white input)."""
    box = ink_bbox(image.pixels < 128)
    if box is None:
        return image
    return image.crop(box.expand(margin, image.width, image.height))


def standard_glyph_image(master_seed: int, class_id: str, variant: int) -> RasterImage:
    """Reference-form render used by the standard index; tight-cropped so
    instance crops and standards share registration."""
    return tight_crop(generate_glyph(master_seed, class_id, variant))
