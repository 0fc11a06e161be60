"""Bloom-filter exact deduplication with constant memory.

The filter is sized from (capacity, target false-positive rate) using the
standard optimal formulas; membership positions come from double hashing
of a 16-byte blake2b digest.  :func:`exact_dedup` streams documents and
keeps the first occurrence of each normalized-text digest.  False
positives drop a unique document at most at the configured rate; false
negatives cannot occur, so a true duplicate is never kept.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from corpusops.corpus import Document
from corpusops.dedup.minhash import normalize

__all__ = ["BloomConfig", "BloomFilter", "DedupStats", "exact_dedup"]


@dataclass(frozen=True)
class BloomConfig:
    """Expected insert count and acceptable false-positive probability."""

    capacity: int
    target_fpr: float

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {self.capacity}")
        if not 0.0 < self.target_fpr < 1.0:
            raise ValueError(
                f"target_fpr must be in (0, 1), got {self.target_fpr}"
            )

    @property
    def num_bits(self) -> int:
        """Optimal bit-array size m = ceil(-n ln p / (ln 2)^2)."""
        return math.ceil(
            -self.capacity * math.log(self.target_fpr) / (math.log(2) ** 2)
        )

    @property
    def num_hashes(self) -> int:
        """Optimal hash count k = round((m / n) ln 2), at least 1."""
        return max(1, round(self.num_bits / self.capacity * math.log(2)))


class BloomFilter:
    """Probabilistic membership set over byte strings."""

    def __init__(self, config: BloomConfig):
        self.config = config
        self.num_bits = config.num_bits
        self.num_hashes = config.num_hashes
        self._bits = bytearray((self.num_bits + 7) // 8)
        self.inserted = 0

    def _positions(self, item: bytes) -> Iterator[int]:
        digest = hashlib.blake2b(item, digest_size=16).digest()
        h1 = int.from_bytes(digest[:8], "little")
        h2 = int.from_bytes(digest[8:], "little") | 1
        for i in range(self.num_hashes):
            yield (h1 + i * h2) % self.num_bits

    def add(self, item: bytes) -> None:
        for pos in self._positions(item):
            self._bits[pos >> 3] |= 1 << (pos & 7)
        self.inserted += 1

    def __contains__(self, item: bytes) -> bool:
        return all(
            self._bits[pos >> 3] & (1 << (pos & 7)) for pos in self._positions(item)
        )

    def add_if_new(self, item: bytes) -> bool:
        """Test-and-set in one pass; True iff the item was (probably) new."""
        new = False
        for pos in self._positions(item):
            mask = 1 << (pos & 7)
            if not self._bits[pos >> 3] & mask:
                new = True
                self._bits[pos >> 3] |= mask
        if new:
            self.inserted += 1
        return new


@dataclass
class DedupStats:
    """Streaming counters; final once the kept stream is fully consumed."""

    seen: int = 0
    dropped: int = 0


def content_digest(text: str) -> bytes:
    """Digest of the normalized text, the identity used for exact dedup."""
    return hashlib.blake2b(normalize(text).encode("utf-8"), digest_size=16).digest()


def exact_dedup(
    documents: Iterable[Document], config: BloomConfig
) -> tuple[Iterator[Document], DedupStats]:
    """Keep first occurrences by normalized-text digest.

    Returns a lazy kept-document iterator plus live stats; ``stats.seen``
    and ``stats.dropped`` are final only after the iterator is exhausted.
    Memory usage is the Bloom bit array, constant in stream length.
    """
    stats = DedupStats()
    bloom = BloomFilter(config)

    def generate() -> Iterator[Document]:
        for doc in documents:
            stats.seen += 1
            if bloom.add_if_new(content_digest(doc.text)):
                yield doc
            else:
                stats.dropped += 1

    return generate(), stats
