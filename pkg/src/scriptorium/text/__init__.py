from .index import TextHit, TextIndex, index_texts, retrieve_texts, tokenize
from .interpret import UNREADABLE, interpret_fragment, lookup_dictionary

__all__ = [
    "TextHit",
    "TextIndex",
    "index_texts",
    "retrieve_texts",
    "tokenize",
    "UNREADABLE",
    "interpret_fragment",
    "lookup_dictionary",
]
