from .cleanup import denoise_character, generate_facsimile
from .external import ExternalModelClient, image_request
from .descriptor import (
    DESCRIPTOR_DIM,
    VisualDescriptor,
    cosine_similarity,
    density_grid,
    encode_image,
    ink_mask,
    orientation_histogram,
    otsu_threshold,
)
from .modality import classify_modality
from .retrieval import DescriptorIndex, RankedHit, classify_glyph, retrieve_glyphs, retrieve_rubbings
from .segmentation import Detection, detect_characters

__all__ = [
    "ExternalModelClient",
    "image_request",
    "DESCRIPTOR_DIM",
    "VisualDescriptor",
    "cosine_similarity",
    "density_grid",
    "encode_image",
    "ink_mask",
    "orientation_histogram",
    "otsu_threshold",
    "classify_modality",
    "DescriptorIndex",
    "RankedHit",
    "classify_glyph",
    "retrieve_glyphs",
    "retrieve_rubbings",
    "Detection",
    "detect_characters",
    "denoise_character",
    "generate_facsimile",
]
