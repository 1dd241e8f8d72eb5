"""Training-free visual descriptor: ink-density grid + orientation histogram.

Layout (D = 320): dims 0..255 are a 16x16 grid of per-cell ink density
computed on the binarized image; dims 256..319 are a 64-bin histogram of
gradient orientations weighted by gradient magnitude. The full vector is
L2-normalized; blank images (no ink) yield the all-zero vector.

The density block is invariant to adding a constant (up to ~8 gray
levels, below clipping) to every pixel: polarity detection uses the
median and the binarization threshold shifts with the histogram.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError
from ..images import RasterImage

GRID = 16
ORIENTATION_BINS = 64
DESCRIPTOR_DIM = GRID * GRID + ORIENTATION_BINS
NORM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class VisualDescriptor:
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != DESCRIPTOR_DIM:
            raise ArgumentError(f"descriptor must have {DESCRIPTOR_DIM} dims, got {len(self.values)}")

    @property
    def is_zero(self) -> bool:
        return not any(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


def otsu_threshold(pixels: np.ndarray) -> int:
    """Threshold maximizing between-class variance; first argmax on ties.

    Pixels <= threshold are the dark class. Returns 0 for flat images.
    """
    hist = np.bincount(pixels.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    omega = np.cumsum(hist) / total           # P(class dark) per candidate t
    mu = np.cumsum(hist * np.arange(256)) / total
    mu_total = mu[-1]
    denom = omega * (1.0 - omega)
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma_b = np.where(denom > 0, (mu_total * omega - mu) ** 2 / denom, 0.0)
    return int(np.argmax(sigma_b))


def background_intensity(image: RasterImage) -> float:
    """Median of the 1-px border ring: a robust background estimate even on
    tight character crops where ink dominates the interior."""
    px = image.pixels
    if px.shape[0] <= 2 or px.shape[1] <= 2:
        return float(np.median(px))
    ring = np.concatenate([px[0, :], px[-1, :], px[1:-1, 0], px[1:-1, -1]])
    return float(np.median(ring))


def normalize_polarity(image: RasterImage) -> np.ndarray:
    """Return pixels with ink dark on a light background.

    Rubbings carry light glyphs on a dark ground: a background estimate
    below mid-gray means the image must be inverted.
    """
    px = image.pixels
    if background_intensity(image) < 128.0:
        return (255 - px.astype(np.int16)).astype(np.uint8)
    return px


def ink_mask(image: RasterImage) -> np.ndarray:
    """Binary ink mask after polarity normalization and Otsu thresholding."""
    px = normalize_polarity(image)
    if px.min() == px.max():
        return np.zeros(px.shape, dtype=bool)
    return px <= otsu_threshold(px)


def density_grid(image: RasterImage, mask: np.ndarray | None = None) -> np.ndarray:
    """16x16 per-cell ink fraction, pre-normalization."""
    if mask is None:
        mask = ink_mask(image)
    h, w = mask.shape
    y_edges = np.linspace(0, h, GRID + 1).astype(int)
    x_edges = np.linspace(0, w, GRID + 1).astype(int)
    grid = np.zeros((GRID, GRID), dtype=np.float64)
    for i in range(GRID):
        for j in range(GRID):
            cell = mask[y_edges[i]:y_edges[i + 1], x_edges[j]:x_edges[j + 1]]
            if cell.size:
                grid[i, j] = cell.mean()
    return grid


def orientation_histogram(image: RasterImage, mask: np.ndarray | None = None) -> np.ndarray:
    """64-bin gradient-orientation histogram over the ink mask boundary."""
    if mask is None:
        mask = ink_mask(image)
    field = mask.astype(np.float64)
    gy, gx = np.gradient(field)
    mag = np.hypot(gx, gy)
    keep = mag > 1e-12
    if not keep.any():
        return np.zeros(ORIENTATION_BINS, dtype=np.float64)
    ang = np.arctan2(gy[keep], gx[keep])  # [-pi, pi]
    bins = np.clip(
        ((ang + np.pi) / (2 * np.pi) * ORIENTATION_BINS).astype(int), 0, ORIENTATION_BINS - 1
    )
    return np.bincount(bins, weights=mag[keep], minlength=ORIENTATION_BINS).astype(np.float64)


DENSITY_WEIGHT = 0.85
ORIENTATION_WEIGHT = 0.15


def encode_image(image: RasterImage) -> VisualDescriptor:
    """Pure, deterministic descriptor; all-zero when the image has no ink.

    Each block is L2-normalized on its own and weighted (0.85 density,
    0.15 orientation) before the final normalization, so the histogram's
    large raw magnitudes cannot swamp the spatial layout.
    """
    mask = ink_mask(image)
    den = density_grid(image, mask).ravel()
    ori = orientation_histogram(image, mask)
    den_norm = float(np.linalg.norm(den))
    ori_norm = float(np.linalg.norm(ori))
    if den_norm == 0.0 and ori_norm == 0.0:
        return VisualDescriptor(values=tuple([0.0] * DESCRIPTOR_DIM))
    raw = np.concatenate([
        DENSITY_WEIGHT * den / den_norm if den_norm else den,
        ORIENTATION_WEIGHT * ori / ori_norm if ori_norm else ori,
    ])
    return VisualDescriptor(values=tuple((raw / np.linalg.norm(raw)).tolist()))


def cosine_similarity(a: VisualDescriptor, b: VisualDescriptor) -> float:
    """Dot product of the (already unit-or-zero) descriptor vectors."""
    return float(np.dot(a.as_array(), b.as_array()))
