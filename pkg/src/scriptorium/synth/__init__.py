from .config import NOISE_LEVELS, NOISE_PARAMS, SynthConfig, derive_seed, rng_for
from .corpus import CorpusPayload, class_ids, fragment_ids, generate_corpus
from .fragments import FragmentGroundTruth, reading_token, render_fragment, render_rubbing
from .glyphs import generate_glyph, standard_glyph_image, tight_crop

__all__ = [
    "NOISE_LEVELS",
    "NOISE_PARAMS",
    "SynthConfig",
    "derive_seed",
    "rng_for",
    "CorpusPayload",
    "class_ids",
    "fragment_ids",
    "generate_corpus",
    "FragmentGroundTruth",
    "reading_token",
    "render_fragment",
    "render_rubbing",
    "generate_glyph",
    "standard_glyph_image",
    "tight_crop",
]
