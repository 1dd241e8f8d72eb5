"""Regex answer extraction per question type.

Grammar (documented, applied to the raw model text):
  yes-no    first standalone yes/no token, case-insensitive; if both values
            appear anywhere the answer is conflicting -> invalid
  which     first standalone option letter A-D; distinct letters -> invalid
  how       exactly one distinct integer anywhere in the text; an optional
            range (e.g. 0-100 for probabilities) invalidates out-of-range
  where     every bracketed [xmin, ymin, xmax, ymax] 4-integer tuple;
            none -> invalid
  generate  the text must decode as base64 PNG image bytes

Invalid extraction returns None; the caller may re-query.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ArgumentError
from ..images import RasterImage

_YESNO_RE = re.compile(r"\b(yes|no)\b", re.IGNORECASE)
_WHICH_RE = re.compile(r"\b([A-D])\b")
_INT_RE = re.compile(r"[-+]?\d+")
_BOX_RE = re.compile(r"\[\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\]")

QTYPES = ("yes-no", "which", "how", "where", "generate")


@dataclass
class ParsedAnswer:
    qtype: str
    value: object  # "yes"/"no" | "A".."D" | int | list[box tuples] | RasterImage


def extract_answer(raw: str, qtype: str,
                   int_range: tuple[int, int] | None = None) -> ParsedAnswer | None:
    if qtype not in QTYPES:
        raise ArgumentError(f"unknown question type {qtype!r}")
    if not isinstance(raw, str):
        return None

    if qtype == "yes-no":
        matches = [m.lower() for m in _YESNO_RE.findall(raw)]
        if not matches or len(set(matches)) > 1:
            return None
        return ParsedAnswer(qtype, matches[0])

    if qtype == "which":
        matches = _WHICH_RE.findall(raw)
        if not matches or len(set(matches)) > 1:
            return None
        return ParsedAnswer(qtype, matches[0])

    if qtype == "how":
        matches = _INT_RE.findall(raw)
        distinct = {int(m) for m in matches}
        if len(distinct) != 1:
            return None
        value = distinct.pop()
        if int_range is not None and not (int_range[0] <= value <= int_range[1]):
            return None
        return ParsedAnswer(qtype, value)

    if qtype == "where":
        boxes = [tuple(int(v) for v in match) for match in _BOX_RE.findall(raw)]
        if not boxes:
            return None
        return ParsedAnswer(qtype, boxes)

    # generate: base64-encoded PNG
    try:
        return ParsedAnswer(qtype, RasterImage.from_base64_png(raw.strip()))
    except ArgumentError:
        return None
