"""MinHash fingerprinting of documents and LSH banding.

Text is canonicalized (:func:`normalize`), cut into word 13-grams
(:func:`shingles`), and sketched with 128 seeded min-wise hash values
(:func:`signature`).  The fraction of equal signature components is an
unbiased estimator of the Jaccard similarity of the shingle sets
(:func:`estimate_jaccard`).  :func:`lsh_keys` splits a signature into
band keys so that similar documents collide in at least one bucket.

The hash family is splitmix64 applied to ``shingle_hash XOR per-perm key``;
keys are drawn from a seeded generator, so signatures are deterministic
given (normalized text, ``perm_seed``) and portable across platforms.
"""

from __future__ import annotations

import hashlib
import unicodedata
from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "LshConfig",
    "Signature",
    "estimate_jaccard",
    "lsh_keys",
    "normalize",
    "shingles",
    "signature",
]

DEFAULT_NUM_PERMUTATIONS = 128
DEFAULT_SHINGLE_SIZE = 13


class _PunctuationStripper(dict):
    """Lazy ``str.translate`` table deleting Unicode P* codepoints."""

    def __missing__(self, codepoint: int) -> str:
        ch = chr(codepoint)
        out = "" if unicodedata.category(ch).startswith("P") else ch
        self[codepoint] = out
        return out


_PUNCT_TABLE = _PunctuationStripper()


def normalize(text: str) -> str:
    """Canonicalize text before fingerprinting.

    Strips leading/trailing whitespace, lowercases, deletes punctuation
    (Unicode categories P*, removed rather than replaced by spaces), and
    collapses every whitespace run (spaces, newlines, tabs) to a single
    space.  Idempotent.
    """
    collapsed = text.strip().lower().translate(_PUNCT_TABLE)
    return " ".join(collapsed.split())


def shingles(normalized: str, n: int = DEFAULT_SHINGLE_SIZE) -> list[str]:
    """All contiguous word n-grams of normalized text.

    Documents shorter than ``n`` words yield a single whole-document
    shingle so they stay dedupable; empty text yields no shingles.
    """
    if n < 1:
        raise ValueError(f"shingle size must be >= 1, got {n}")
    words = normalized.split()
    if not words:
        return []
    if len(words) < n:
        return [" ".join(words)]
    return [" ".join(words[i : i + n]) for i in range(len(words) - n + 1)]


@dataclass(eq=False)
class Signature:
    """MinHash sketch: per-permutation minimum hash values.

    ``values`` has dtype uint64 and fixed length (default 128); two
    signatures are comparable only when built with the same ``perm_seed``.
    """

    values: np.ndarray
    perm_seed: int

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.uint64)
        if self.values.ndim != 1 or self.values.size < 1:
            raise ValueError("signature values must be a non-empty 1-D vector")

    def __len__(self) -> int:
        return int(self.values.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Signature):
            return NotImplemented
        return self.perm_seed == other.perm_seed and np.array_equal(
            self.values, other.values
        )


def _shingle_hash(shingle: str) -> int:
    digest = hashlib.blake2b(shingle.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _splitmix64(x: np.ndarray) -> np.ndarray:
    # Finalizer from the splitmix64 generator; all ops wrap mod 2**64.
    with np.errstate(over="ignore"):
        x = x + np.uint64(0x9E3779B97F4A7C15)
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return x ^ (x >> np.uint64(31))


def _perm_keys(num_perm: int, perm_seed: int) -> np.ndarray:
    rng = np.random.default_rng(perm_seed)
    return rng.integers(0, 2**64, size=num_perm, dtype=np.uint64)


def signature(
    shingle_set: Iterable[str],
    perm_seed: int,
    num_perm: int = DEFAULT_NUM_PERMUTATIONS,
) -> Signature:
    """MinHash signature of a shingle set.

    Component i is the minimum over shingles of the i-th seeded hash
    function.  Raises ``ValueError`` on an empty shingle set (the document
    was empty after normalization; callers should drop it).
    """
    hashed = np.fromiter(
        (_shingle_hash(s) for s in set(shingle_set)), dtype=np.uint64
    )
    if hashed.size == 0:
        raise ValueError("cannot fingerprint an empty shingle set")
    keys = _perm_keys(num_perm, perm_seed)
    mins = np.full(num_perm, np.iinfo(np.uint64).max, dtype=np.uint64)
    # Chunk the shingle axis so huge documents stay within a fixed footprint.
    for start in range(0, hashed.size, 8192):
        chunk = hashed[start : start + 8192]
        table = _splitmix64(chunk[None, :] ^ keys[:, None])
        np.minimum(mins, table.min(axis=1), out=mins)
    return Signature(values=mins, perm_seed=perm_seed)


def estimate_jaccard(sig_a: Signature, sig_b: Signature) -> float:
    """Fraction of equal components: unbiased Jaccard estimate in [0, 1]."""
    if len(sig_a) != len(sig_b):
        raise ValueError(
            f"signature lengths differ: {len(sig_a)} vs {len(sig_b)}"
        )
    if sig_a.perm_seed != sig_b.perm_seed:
        raise ValueError(
            f"signatures from different perm seeds: "
            f"{sig_a.perm_seed} vs {sig_b.perm_seed}"
        )
    return float(np.mean(sig_a.values == sig_b.values))


@dataclass(frozen=True)
class LshConfig:
    """Banding shape: ``bands * rows`` must equal the signature length."""

    bands: int = 16
    rows: int = 8

    def __post_init__(self) -> None:
        if self.bands < 1 or self.rows < 1:
            raise ValueError("bands and rows must be >= 1")


def lsh_keys(sig: Signature, config: LshConfig = LshConfig()) -> list[bytes]:
    """One stable bucket key per band.

    Key i hashes components [i*rows, (i+1)*rows) together with the band
    index, so equal sub-bands collide and distinct bands never do.
    """
    if config.bands * config.rows != len(sig):
        raise ValueError(
            f"bands*rows = {config.bands * config.rows} does not divide "
            f"signature of length {len(sig)}"
        )
    keys = []
    for band in range(config.bands):
        chunk = sig.values[band * config.rows : (band + 1) * config.rows]
        payload = band.to_bytes(4, "little") + chunk.tobytes()
        keys.append(hashlib.blake2b(payload, digest_size=16).digest())
    return keys
