from .records import (
    RECORD_FAMILIES,
    CharacterInstance,
    DictionaryEntry,
    DocumentChunk,
    FacsimileRecord,
    GlyphClassEntry,
    InterpretationRecord,
    Modality,
    RubbingRecord,
    StoreKind,
)
from .snapshot import (
    FAMILY_ORDER,
    FORMAT_VERSION,
    FragmentBundle,
    IngestReport,
    KbSnapshot,
    load_snapshot,
    save_snapshot,
)

__all__ = [
    "RECORD_FAMILIES",
    "CharacterInstance",
    "DictionaryEntry",
    "DocumentChunk",
    "FacsimileRecord",
    "GlyphClassEntry",
    "InterpretationRecord",
    "Modality",
    "RubbingRecord",
    "StoreKind",
    "FAMILY_ORDER",
    "FORMAT_VERSION",
    "FragmentBundle",
    "IngestReport",
    "KbSnapshot",
    "load_snapshot",
    "save_snapshot",
]
