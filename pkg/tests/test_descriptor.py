import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scriptorium.images import RasterImage
from scriptorium.synth.glyphs import generate_glyph
from scriptorium.vision.descriptor import (
    DESCRIPTOR_DIM,
    GRID,
    density_grid,
    encode_image,
    ink_mask,
    otsu_threshold,
)


def test_all_white_gives_zero_descriptor():
    desc = encode_image(RasterImage.blank(64, 64))
    assert desc.is_zero
    assert len(desc.values) == DESCRIPTOR_DIM


def test_density_grid_black_square_oracle():
    # 256x256 white, black 16x16 square at the origin: each grid cell covers
    # exactly 16x16 px, so cell (0,0) is fully inked and all others empty
    px = np.full((256, 256), 255, dtype=np.uint8)
    px[0:16, 0:16] = 0
    grid = density_grid(RasterImage(px))
    assert grid[0, 0] == pytest.approx(1.0)
    rest = grid.copy()
    rest[0, 0] = 0.0
    assert rest.sum() == 0.0


def test_density_grid_half_cell_oracle():
    # 8x16 ink block = exactly half of cell (0,0) by pixel count
    px = np.full((256, 256), 255, dtype=np.uint8)
    px[0:8, 0:16] = 0
    assert density_grid(RasterImage(px))[0, 0] == pytest.approx(0.5)


def test_encode_deterministic():
    img = generate_glyph(7, "C03", 2)
    assert encode_image(img).values == encode_image(img).values


def test_norm_unit_or_zero():
    for image in (generate_glyph(7, "C00", 1), RasterImage.blank(32, 32)):
        desc = encode_image(image)
        norm = float(np.linalg.norm(desc.as_array()))
        assert norm == 0.0 or abs(norm - 1.0) <= 1e-6


def test_density_block_invariant_to_small_gray_shift():
    glyph = generate_glyph(7, "C05", 1)
    for shift in (1, 4, 8):
        shifted = RasterImage(
            np.clip(glyph.pixels.astype(np.int16) + shift, 0, 255).astype(np.uint8))
        np.testing.assert_array_equal(density_grid(glyph), density_grid(shifted))


def test_polarity_invariance_of_mask():
    glyph = generate_glyph(7, "C01", 1)
    inverted = RasterImage(255 - glyph.pixels)
    np.testing.assert_array_equal(ink_mask(glyph), ink_mask(inverted))


def test_otsu_two_level_split():
    px = np.full((20, 20), 255, dtype=np.uint8)
    px[:5, :] = 8
    t = otsu_threshold(px)
    assert 8 <= t < 255
    assert ((px <= t).sum()) == 100


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_descriptor_norm_property_random_images(seed):
    rng = np.random.default_rng(seed)
    img = RasterImage(rng.integers(0, 256, size=(40, 40), dtype=np.uint8))
    desc = encode_image(img)
    norm = float(np.linalg.norm(desc.as_array()))
    assert norm == 0.0 or abs(norm - 1.0) <= 1e-6
    assert len(desc.values) == DESCRIPTOR_DIM
    assert density_grid(img).shape == (GRID, GRID)
