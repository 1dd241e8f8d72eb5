"""Exhaustive cosine-similarity retrieval over descriptor indexes.

Desk-scale stores are scored exactly (no ANN); ties break by ascending
target id so rankings are fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ArgumentError, StateError
from ..images import RasterImage
from .descriptor import VisualDescriptor, encode_image


@dataclass(frozen=True)
class RankedHit:
    target_id: str
    score: float
    rank: int  # 1-based
    payload: dict = field(default_factory=dict, compare=False)


class DescriptorIndex:
    """Ordered id -> unit (or zero) descriptor store with exact top-k search."""

    def __init__(self):
        self._ids: list[str] = []
        self._vectors: list[np.ndarray] = []
        self._meta: dict[str, dict] = {}

    def __len__(self) -> int:
        return len(self._ids)

    def add(self, target_id: str, descriptor: VisualDescriptor, **meta):
        if target_id in self._meta:
            raise ArgumentError(f"duplicate descriptor id {target_id!r}")
        self._ids.append(target_id)
        self._vectors.append(descriptor.as_array())
        self._meta[target_id] = meta

    def meta(self, target_id: str) -> dict:
        return self._meta[target_id]

    def ids(self) -> list[str]:
        return list(self._ids)

    def matrix(self) -> np.ndarray:
        if not self._vectors:
            return np.zeros((0, 0))
        return np.stack(self._vectors)

    def search(self, query: VisualDescriptor, k: int) -> list[RankedHit]:
        if k <= 0:
            raise ArgumentError(f"k must be positive, got {k}")
        if not self._ids:
            raise StateError("descriptor index is empty")
        scores = self.matrix() @ query.as_array()
        order = sorted(range(len(self._ids)), key=lambda i: (-scores[i], self._ids[i]))
        return [
            RankedHit(
                target_id=self._ids[i],
                score=float(scores[i]),
                rank=rank,
                payload=dict(self._meta[self._ids[i]]),
            )
            for rank, i in enumerate(order[:k], start=1)
        ]

    def checksum_payload(self) -> list:
        """Stable content view for index checksumming."""
        return [
            [tid, [float(x) for x in vec]]
            for tid, vec in sorted(zip(self._ids, self._vectors), key=lambda p: p[0])
        ]


def retrieve_glyphs(query: VisualDescriptor, index: DescriptorIndex, k: int) -> list[RankedHit]:
    """Top-k glyph instances (or standards) by cosine similarity."""
    return index.search(query, k)


VOTE_POOL = 5


def classify_glyph(crop: RasterImage, standard_index: DescriptorIndex,
                   k: int = VOTE_POOL) -> tuple[str, list[tuple[str, float]]]:
    """Nearest glyph class by majority vote over the top-5 standard images.

    Vote ties break by the class's best similarity score, then ascending
    class id. Returns (winner, ranked [(class_id, best_score)]).
    """
    if len(standard_index) == 0:
        raise StateError("standard image index is empty")
    hits = standard_index.search(encode_image(crop), k)
    votes: dict[str, int] = {}
    best: dict[str, float] = {}
    for hit in hits:
        cid = hit.payload.get("class_id", hit.target_id)
        votes[cid] = votes.get(cid, 0) + 1
        best[cid] = max(best.get(cid, -1.0), hit.score)
    ranked = sorted(votes, key=lambda c: (-votes[c], -best[c], c))
    return ranked[0], [(c, best[c]) for c in ranked]


def retrieve_rubbings(query: RasterImage, kb, k: int) -> list[RankedHit]:
    """Rank whole rubbings by visual similarity; hits carry the fragment's
    interpretation records (rubbing-to-interpretation matching)."""
    index = kb.indexes.rubbing_index
    if len(index) == 0:
        raise StateError("rubbing store is empty")
    hits = index.search(encode_image(query), k)
    enriched = []
    for hit in hits:
        bundle = kb.lookup_fragment(hit.target_id)
        payload = dict(hit.payload)
        payload["interpretations"] = [rec.to_dict() for rec in bundle.interpretations]
        enriched.append(
            RankedHit(target_id=hit.target_id, score=hit.score, rank=hit.rank, payload=payload)
        )
    return enriched
