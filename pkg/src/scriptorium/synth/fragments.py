"""Fragment composition and rubbing-style degradation.

Reading order convention: column-major, top-to-bottom within a column,
columns right-to-left across the canvas. This mimics the usual layout of
the source material but is purely a generator convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ArgumentError
from ..images import BoundingBox, RasterImage, ink_bbox
from .config import (
    CANVAS_MARGIN,
    CELL,
    GLYPH_SIZE,
    NOISE_PARAMS,
    PLACEMENT_JITTER,
    SynthConfig,
    rng_for,
)
from .glyphs import generate_glyph


@dataclass
class CharAnnotation:
    reading_index: int
    class_id: str
    bbox: BoundingBox  # tight ink box in fragment coordinates
    variation_seed: int


@dataclass
class FragmentGroundTruth:
    fragment_id: str
    chars: list[CharAnnotation] = field(default_factory=list)
    interpretation: str = ""

    @property
    def char_count(self) -> int:
        return len(self.chars)


def reading_token(class_id: str) -> str:
    """Placeholder modern reading for a glyph class (no real script content)."""
    return f"token-{class_id}"


def grid_capacity(canvas: tuple[int, int]) -> tuple[int, int]:
    cols = (canvas[0] - 2 * CANVAS_MARGIN) // CELL
    rows = (canvas[1] - 2 * CANVAS_MARGIN) // CELL
    return cols, rows


def render_fragment(config: SynthConfig, fragment_id: str, n_chars: int,
                    class_ids: list[str]) -> tuple[RasterImage, FragmentGroundTruth]:
    """Compose a clean facsimile and its ground-truth annotations.

    Glyphs sit on a right-to-left column grid with small jitter; annotation
    boxes are the exact ink extents of each placed glyph, so they are
    disjoint by construction (cell pitch > glyph size + jitter).
    """
    width, height = config.canvas
    cols, rows = grid_capacity(config.canvas)
    if n_chars > cols * rows:
        raise ArgumentError(
            f"canvas {width}x{height} holds at most {cols * rows} characters, got {n_chars}"
        )
    rng = rng_for(config.master_seed, "fragment", fragment_id)
    canvas = np.full((height, width), 255, dtype=np.uint8)
    truth = FragmentGroundTruth(fragment_id=fragment_id)

    for i in range(n_chars):
        col = i // rows  # column 0 is the rightmost
        row = i % rows
        cell_x = width - CANVAS_MARGIN - (col + 1) * CELL
        cell_y = CANVAS_MARGIN + row * CELL
        pad = (CELL - GLYPH_SIZE) // 2
        jx, jy = rng.integers(-PLACEMENT_JITTER, PLACEMENT_JITTER + 1, size=2)
        x0, y0 = cell_x + pad + int(jx), cell_y + pad + int(jy)

        class_id = class_ids[int(rng.integers(0, len(class_ids)))]
        variation = int(rng.integers(1, 1_000_000))
        glyph = generate_glyph(config.master_seed, class_id, variation)
        tile = canvas[y0:y0 + GLYPH_SIZE, x0:x0 + GLYPH_SIZE]
        np.minimum(tile, glyph.pixels, out=tile)

        local = ink_bbox(glyph.pixels < 128)
        assert local is not None  # glyphs always carry ink
        truth.chars.append(
            CharAnnotation(
                reading_index=i,
                class_id=class_id,
                bbox=BoundingBox(x0 + local.xmin, y0 + local.ymin,
                                 x0 + local.xmax, y0 + local.ymax),
                variation_seed=variation,
            )
        )

    truth.interpretation = " ".join(reading_token(c.class_id) for c in truth.chars)
    return RasterImage(canvas), truth


def _draw_line(canvas: np.ndarray, p0, p1, value: int, width: int):
    """Bresenham-ish line by dense sampling; width is the full stroke width."""
    n = max(2, int(np.hypot(p1[0] - p0[0], p1[1] - p0[1])) * 2)
    h, w = canvas.shape
    half = max(0, (width - 1) // 2)
    for t in np.linspace(0.0, 1.0, n):
        x = int(round(p0[0] + (p1[0] - p0[0]) * t))
        y = int(round(p0[1] + (p1[1] - p0[1]) * t))
        x0, x1 = max(0, x - half), min(w, x + half + 1)
        y0, y1 = max(0, y - half), min(h, y + half + 1)
        if x0 < x1 and y0 < y1:
            canvas[y0:y1, x0:x1] = value


def render_rubbing(facsimile: RasterImage, noise: str, seed: int) -> RasterImage:
    """Degrade a facsimile into a rubbing-style image (light ink on dark).

    noise="none" is the exact polarity inversion (out = 255 - in). Other
    levels add, in order: background texture, bright speckle dots, and
    thin bright crack lines, with the frozen parameters in NOISE_PARAMS.
    """
    if noise not in NOISE_PARAMS:
        raise ArgumentError(f"unknown noise level {noise!r}")
    params = NOISE_PARAMS[noise]
    out = (255 - facsimile.pixels.astype(np.int16))
    if noise == "none":
        return RasterImage(out.astype(np.uint8))

    rng = rng_for(seed, "rubbing", noise)
    h, w = out.shape
    if params["texture_sigma"] > 0:
        out = out + rng.normal(0.0, params["texture_sigma"], size=out.shape)
    out = np.clip(out, 0, 255).astype(np.uint8)

    for _ in range(params["speckles"]):
        x, y = int(rng.integers(0, w)), int(rng.integers(0, h))
        size = int(rng.integers(1, 3))
        value = int(rng.integers(170, 256))
        out[y:min(h, y + size), x:min(w, x + size)] = value

    for _ in range(params["cracks"]):
        # short local scratches (not canvas-spanning), so a crack never
        # bridges distant character regions during proximity clustering
        cx, cy = rng.uniform(0, w - 1), rng.uniform(0, h - 1)
        angle = rng.uniform(0, np.pi)
        length = rng.uniform(25, 70)
        dx, dy = np.cos(angle) * length / 2, np.sin(angle) * length / 2
        p0 = (np.clip(cx - dx, 0, w - 1), np.clip(cy - dy, 0, h - 1))
        p1 = (np.clip(cx + dx, 0, w - 1), np.clip(cy + dy, 0, h - 1))
        _draw_line(out, p0, p1, int(rng.integers(150, 230)), params["crack_width"])

    return RasterImage(out)
