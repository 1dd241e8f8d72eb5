"""Generator configuration and deterministic seed derivation."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from ..errors import ArgumentError

NOISE_LEVELS = ("none", "low", "high")

# Frozen per-level noise parameters. Other modules' test thresholds
# (detection counts, denoise/round-trip SSIM, re-noised retrieval) are
# calibrated against these exact values; change them and recalibrate.
NOISE_PARAMS = {
    "none": {"speckles": 0, "cracks": 0, "crack_width": 0, "texture_sigma": 0.0},
    "low": {"speckles": 14, "cracks": 1, "crack_width": 1, "texture_sigma": 6.0},
    "high": {"speckles": 60, "cracks": 4, "crack_width": 2, "texture_sigma": 14.0},
}

# Fragment layout constants (pixels). Cell pitch leaves an inter-glyph gap
# well above the detector's proximity-merge threshold.
CELL = 112
GLYPH_SIZE = 56
PLACEMENT_JITTER = 4
CANVAS_MARGIN = 16
CROP_MARGIN = 3
STROKE_RADIUS = 3  # stroke width ~7px: survives a 3x3 morphological open intact
STANDARD_VARIANTS = 2  # standard images rendered per glyph class


@dataclass(frozen=True)
class SynthConfig:
    master_seed: int = 7
    n_classes: int = 10
    n_fragments: int = 20
    chars_per_fragment: tuple[int, int] = (3, 6)
    canvas: tuple[int, int] = (480, 480)  # (width, height)
    noise: str = "low"
    n_documents: int = 6
    interpretation_sources: tuple[str, ...] = field(
        default=("corpus-a", "corpus-b"), repr=False
    )

    def __post_init__(self):
        lo, hi = self.chars_per_fragment
        if min(self.n_classes, self.n_fragments, self.n_documents, lo) < 1 or hi < lo:
            raise ArgumentError("all generator counts must be >= 1 and ranges ordered")
        if self.noise not in NOISE_LEVELS:
            raise ArgumentError(f"noise must be one of {NOISE_LEVELS}, got {self.noise!r}")
        if min(self.canvas) < CELL + 2 * CANVAS_MARGIN:
            raise ArgumentError(f"canvas too small; needs at least {CELL + 2 * CANVAS_MARGIN} px per side")


def derive_seed(master_seed: int, *parts) -> int:
    """Mix a master seed with string-able key parts into a 64-bit stream seed.

    sha256 over "master:part:part:..."; the first 8 digest bytes, big-endian.
    Stable across processes, so parallel generation matches serial output.
    """
    key = ":".join([str(master_seed), *[str(p) for p in parts]])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def rng_for(master_seed: int, *parts) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, *parts))
