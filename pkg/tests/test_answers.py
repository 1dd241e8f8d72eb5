import pytest
from hypothesis import given, settings, strategies as st

from scriptorium.bench.answers import extract_answer
from scriptorium.errors import ArgumentError
from scriptorium.images import RasterImage

from grammar_cases import GRAMMAR_CASES


@pytest.mark.parametrize("raw,qtype,int_range,expected", GRAMMAR_CASES)
def test_grammar_table(raw, qtype, int_range, expected):
    parsed = extract_answer(raw, qtype, int_range=int_range)
    if expected is None:
        assert parsed is None
    else:
        assert parsed is not None
        assert parsed.value == expected


def test_grammar_table_size():
    assert len(GRAMMAR_CASES) >= 30


def test_generate_round_trip():
    img = RasterImage.blank(9, 7, value=3)
    parsed = extract_answer(img.to_base64_png(), "generate")
    assert parsed is not None
    assert parsed.value.same_pixels(img)


def test_unknown_qtype():
    with pytest.raises(ArgumentError):
        extract_answer("yes", "essay")


def test_non_string_input_invalid():
    assert extract_answer(None, "yes-no") is None


@settings(max_examples=80, deadline=None)
@given(st.text(max_size=60))
def test_extraction_never_crashes(raw):
    for qtype in ("yes-no", "which", "how", "where"):
        parsed = extract_answer(raw, qtype, int_range=(0, 100) if qtype == "how" else None)
        assert parsed is None or parsed.qtype == qtype
