"""Grayscale raster images and pixel-space bounding boxes.

Images are 8-bit grayscale, row-major. Boxes are half-open pixel
rectangles [xmin, ymin, xmax, ymax) with the origin at the top-left, so
``width = xmax - xmin`` and a box's pixels are ``img[ymin:ymax, xmin:xmax]``.
"""

from __future__ import annotations

import base64
import io
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import ArgumentError


@dataclass(frozen=True, order=True)
class BoundingBox:
    xmin: int
    ymin: int
    xmax: int
    ymax: int

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ArgumentError(f"degenerate bbox {self.as_tuple()}")
        if min(self.xmin, self.ymin) < 0:
            raise ArgumentError(f"negative bbox coordinate {self.as_tuple()}")

    @property
    def width(self) -> int:
        return self.xmax - self.xmin

    @property
    def height(self) -> int:
        return self.ymax - self.ymin

    @property
    def area(self) -> int:
        return self.width * self.height

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.xmin, self.ymin, self.xmax, self.ymax)

    def within(self, width: int, height: int) -> bool:
        return self.xmax <= width and self.ymax <= height

    def union(self, other: "BoundingBox") -> "BoundingBox":
        return BoundingBox(
            min(self.xmin, other.xmin),
            min(self.ymin, other.ymin),
            max(self.xmax, other.xmax),
            max(self.ymax, other.ymax),
        )

    def expand(self, margin: int, width: int, height: int) -> "BoundingBox":
        """Grow by `margin` on every side, clipped to image bounds."""
        return BoundingBox(
            max(0, self.xmin - margin),
            max(0, self.ymin - margin),
            min(width, self.xmax + margin),
            min(height, self.ymax + margin),
        )

    def gap_to(self, other: "BoundingBox") -> int:
        """Chebyshev separation between two boxes; 0 when they touch or overlap."""
        dx = max(other.xmin - self.xmax, self.xmin - other.xmax, 0)
        dy = max(other.ymin - self.ymax, self.ymin - other.ymax, 0)
        return max(dx, dy)

    @classmethod
    def from_list(cls, xs) -> "BoundingBox":
        xs = list(xs)
        if len(xs) != 4:
            raise ArgumentError(f"bbox needs 4 coordinates, got {len(xs)}")
        return cls(int(xs[0]), int(xs[1]), int(xs[2]), int(xs[3]))


def box_iou(a: BoundingBox, b: BoundingBox) -> float:
    ix = min(a.xmax, b.xmax) - max(a.xmin, b.xmin)
    iy = min(a.ymax, b.ymax) - max(a.ymin, b.ymin)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


@dataclass(eq=False)
class RasterImage:
    """8-bit grayscale raster; `pixels` has shape (height, width), dtype uint8."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ArgumentError(f"raster must be 2-D and non-empty, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            raise ArgumentError(f"raster must be uint8, got {arr.dtype}")
        self.pixels = arr

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    def crop(self, box: BoundingBox) -> "RasterImage":
        if not box.within(self.width, self.height):
            raise ArgumentError(f"bbox {box.as_tuple()} exceeds {self.width}x{self.height} image")
        return RasterImage(self.pixels[box.ymin:box.ymax, box.xmin:box.xmax].copy())

    def mean_intensity(self) -> float:
        return float(self.pixels.mean())

    def same_pixels(self, other: "RasterImage") -> bool:
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def to_png_bytes(self) -> bytes:
        buf = io.BytesIO()
        Image.fromarray(self.pixels, mode="L").save(buf, format="PNG")
        return buf.getvalue()

    def to_base64_png(self) -> str:
        return base64.b64encode(self.to_png_bytes()).decode("ascii")

    @classmethod
    def from_png_bytes(cls, data: bytes) -> "RasterImage":
        try:
            with Image.open(io.BytesIO(data)) as im:
                return cls(np.asarray(im.convert("L"), dtype=np.uint8))
        except ArgumentError:
            raise
        except Exception as exc:
            raise ArgumentError(f"undecodable image: {exc}") from exc

    @classmethod
    def from_base64_png(cls, text: str) -> "RasterImage":
        try:
            raw = base64.b64decode(text, validate=True)
        except Exception as exc:
            raise ArgumentError(f"invalid base64 image payload: {exc}") from exc
        return cls.from_png_bytes(raw)

    @classmethod
    def blank(cls, width: int, height: int, value: int = 255) -> "RasterImage":
        return cls(np.full((height, width), value, dtype=np.uint8))


def ink_bbox(mask: np.ndarray) -> BoundingBox | None:
    """Tight box around the True pixels of a binary mask, None when empty."""
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        return None
    return BoundingBox(int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)
