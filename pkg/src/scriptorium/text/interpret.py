"""Fragment-level interpretation alignment and dictionary lookup."""

from __future__ import annotations

from ..errors import NotFoundError

UNREADABLE = "<unreadable>"


def interpret_fragment(kb, fragment_id: str) -> list[tuple]:
    """Pair each character (in reading order) with its modern reading.

    Alignments merge across the fragment's interpretation records, scanned
    in record-key order with the first alignment per reading index winning.
    Characters without an alignment carry the UNREADABLE marker. A fragment
    with no interpretation record yields all-unreadable pairs, not an error.
    """
    bundle = kb.lookup_fragment(fragment_id)
    alignment: dict[int, str] = {}
    for record in bundle.interpretations:
        for idx, reading in record.aligned_readings or ():
            alignment.setdefault(idx, reading)
    return [
        (char, alignment.get(char.reading_index, UNREADABLE))
        for char in bundle.characters
    ]


def lookup_dictionary(kb, class_id: str) -> list[tuple[str, str]]:
    """All (source, interpretation) entries for a glyph class, source-ordered."""
    entry = kb.dictionary.get(class_id)
    if entry is None:
        raise NotFoundError(f"unknown glyph class {class_id!r}")
    return sorted(entry.entries, key=lambda pair: pair[0])
