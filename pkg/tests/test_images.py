import numpy as np
import pytest
from hypothesis import given, strategies as st

from scriptorium.errors import ArgumentError
from scriptorium.images import BoundingBox, RasterImage, box_iou, ink_bbox


def test_bbox_degenerate_rejected():
    with pytest.raises(ArgumentError):
        BoundingBox(5, 0, 5, 10)
    with pytest.raises(ArgumentError):
        BoundingBox(0, 9, 10, 9)


def test_bbox_negative_rejected():
    with pytest.raises(ArgumentError):
        BoundingBox(-1, 0, 5, 5)


def test_bbox_area_and_dims():
    box = BoundingBox(2, 3, 10, 7)
    assert (box.width, box.height, box.area) == (8, 4, 32)


def test_box_iou_hand_case():
    # half-open [0,0,10,10] vs [5,0,15,10]: inter 50, union 150
    assert box_iou(BoundingBox(0, 0, 10, 10), BoundingBox(5, 0, 15, 10)) == pytest.approx(1 / 3)


def test_box_iou_identical_and_disjoint():
    a = BoundingBox(1, 1, 9, 9)
    assert box_iou(a, a) == 1.0
    assert box_iou(a, BoundingBox(20, 20, 30, 30)) == 0.0


def test_gap_to_touching_is_zero():
    a = BoundingBox(0, 0, 10, 10)
    assert a.gap_to(BoundingBox(10, 0, 20, 10)) == 0
    assert a.gap_to(BoundingBox(13, 0, 20, 10)) == 3


boxes = st.tuples(st.integers(0, 40), st.integers(0, 40),
                  st.integers(1, 20), st.integers(1, 20)).map(
    lambda t: BoundingBox(t[0], t[1], t[0] + t[2], t[1] + t[3]))


@given(boxes, boxes)
def test_iou_symmetric_and_bounded(a, b):
    assert box_iou(a, b) == box_iou(b, a)
    assert 0.0 <= box_iou(a, b) <= 1.0


@given(boxes, boxes)
def test_union_contains_both(a, b):
    u = a.union(b)
    assert u.xmin <= min(a.xmin, b.xmin) and u.xmax >= max(a.xmax, b.xmax)
    assert box_iou(a, u) > 0


def test_raster_validation():
    with pytest.raises(ArgumentError):
        RasterImage(np.zeros((0, 4), dtype=np.uint8))
    with pytest.raises(ArgumentError):
        RasterImage(np.zeros((4, 4), dtype=np.float32))
    with pytest.raises(ArgumentError):
        RasterImage(np.zeros((4, 4, 3), dtype=np.uint8))


def test_png_round_trip():
    rng = np.random.default_rng(3)
    img = RasterImage(rng.integers(0, 256, size=(17, 23), dtype=np.uint8))
    back = RasterImage.from_png_bytes(img.to_png_bytes())
    assert back.same_pixels(img)
    again = RasterImage.from_base64_png(img.to_base64_png())
    assert again.same_pixels(img)


def test_undecodable_png_rejected():
    with pytest.raises(ArgumentError):
        RasterImage.from_png_bytes(b"not a png")
    with pytest.raises(ArgumentError):
        RasterImage.from_base64_png("@@@not-base64@@@")


def test_crop_bounds_checked():
    img = RasterImage.blank(10, 10)
    with pytest.raises(ArgumentError):
        img.crop(BoundingBox(0, 0, 11, 5))
    crop = img.crop(BoundingBox(2, 3, 7, 9))
    assert (crop.width, crop.height) == (5, 6)


def test_ink_bbox_tightness():
    px = np.full((12, 12), 255, dtype=np.uint8)
    px[3:7, 5:9] = 0
    box = ink_bbox(px < 128)
    assert box.as_tuple() == (5, 3, 9, 7)
    assert ink_bbox(np.zeros((4, 4), dtype=bool)) is None
