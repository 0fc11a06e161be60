"""Online best-fit packing of documents into fixed-length sequences.

Each arriving document goes into the open bin with the least remaining
room that still fits it.  If nothing fits, a new bin opens; when the open
table is full, the fullest bin is sealed first (emitted with padding).
Documents longer than the sequence capacity are skipped and counted, and
no document is ever split, so truncation is zero by construction.

The open-bin table is bounded (``max_open_bins``), keeping memory constant
for arbitrarily long streams; remaining capacities are kept sorted so each
placement is a bisect plus small list surgery.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Iterator

__all__ = [
    "PackInput",
    "PackStats",
    "PackedSequence",
    "optimal_bins",
    "pack_online",
    "pack_stats",
]


@dataclass(frozen=True)
class PackInput:
    """A document to pack: opaque id plus its length in tokens."""

    id: str
    length: int

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError(f"length must be >= 1, got {self.length}")


@dataclass(frozen=True)
class PackedSequence:
    """One assembled training sequence; entries are whole documents."""

    capacity: int
    entries: tuple[tuple[str, int], ...]
    padding: int

    def __post_init__(self) -> None:
        used = sum(length for _, length in self.entries)
        if used + self.padding != self.capacity:
            raise ValueError(
                f"entries ({used}) + padding ({self.padding}) != capacity "
                f"({self.capacity})"
            )
        if self.padding < 0:
            raise ValueError("padding must be >= 0")


@dataclass
class PackStats:
    sequences: int = 0
    docs_packed: int = 0
    docs_skipped: int = 0
    padding_tokens: int = 0
    capacity: int = 0

    @property
    def truncation_ratio(self) -> float:
        return 0.0  # no document is ever split

    @property
    def padding_ratio(self) -> float:
        if self.sequences == 0:
            return 0.0
        return self.padding_tokens / (self.sequences * self.capacity)


class _Bin:
    __slots__ = ("entries", "used", "order")

    def __init__(self, order: int):
        self.entries: list[tuple[str, int]] = []
        self.used = 0
        self.order = order


def pack_online(
    inputs: Iterable[PackInput],
    capacity: int,
    max_open_bins: int = 64,
) -> tuple[Iterator[PackedSequence], PackStats]:
    """Pack a document stream into sequences of ``capacity`` tokens.

    Returns a lazy sequence iterator plus live stats (final once the
    iterator is exhausted).  Deterministic: ties on remaining capacity are
    broken toward the earliest-opened bin, and end-of-stream seals the
    remaining bins in opening order.
    """
    if capacity < 1:
        raise ValueError(f"capacity must be >= 1, got {capacity}")
    if max_open_bins < 1:
        raise ValueError(f"max_open_bins must be >= 1, got {max_open_bins}")

    stats = PackStats(capacity=capacity)

    def generate() -> Iterator[PackedSequence]:
        # Parallel arrays sorted by (remaining, order): table[i] is the bin
        # whose remaining capacity is keys[i][0].
        keys: list[tuple[int, int]] = []
        table: list[_Bin] = []
        opened = 0

        def seal(bin_: _Bin) -> PackedSequence:
            stats.sequences += 1
            padding = capacity - bin_.used
            stats.padding_tokens += padding
            return PackedSequence(
                capacity=capacity, entries=tuple(bin_.entries), padding=padding
            )

        def remove_at(i: int) -> _Bin:
            keys.pop(i)
            return table.pop(i)

        for item in inputs:
            if item.length > capacity:
                stats.docs_skipped += 1
                continue
            # Best fit: smallest remaining >= length; ties -> oldest bin.
            i = bisect_left(keys, (item.length, -1))
            if i < len(keys):
                bin_ = remove_at(i)
            else:
                if len(table) >= max_open_bins:
                    yield seal(remove_at(0))  # fullest bin, oldest on ties
                bin_ = _Bin(opened)
                opened += 1
            bin_.entries.append((item.id, item.length))
            bin_.used += item.length
            stats.docs_packed += 1
            remaining = capacity - bin_.used
            if remaining == 0:
                yield seal(bin_)
            else:
                position = bisect_left(keys, (remaining, bin_.order))
                keys.insert(position, (remaining, bin_.order))
                table.insert(position, bin_)

        for bin_ in sorted(table, key=lambda b: b.order):
            yield seal(bin_)

    return generate(), stats


def pack_stats(sequences: Iterable[PackedSequence]) -> PackStats:
    """Aggregate ratios over already-packed sequences.

    ``docs_skipped`` is not recoverable from sequences alone and stays 0.
    """
    stats = PackStats()
    for seq in sequences:
        if stats.sequences and seq.capacity != stats.capacity:
            raise ValueError("sequences have mixed capacities")
        stats.capacity = seq.capacity
        stats.sequences += 1
        stats.docs_packed += len(seq.entries)
        stats.padding_tokens += seq.padding
    return stats


def optimal_bins(lengths: Iterable[int], capacity: int) -> int:
    """Exact minimum bin count by branch and bound (test oracle).

    Limited to 14 items; larger inputs raise ``ValueError``.
    """
    items = sorted(lengths, reverse=True)
    if len(items) > 14:
        raise ValueError(f"too many items for exhaustive search: {len(items)}")
    if any(length > capacity for length in items):
        raise ValueError("an item exceeds the bin capacity")
    if not items:
        return 0

    best = len(items)  # one bin per item always works
    total = sum(items)

    def search(index: int, bins: list[int]) -> None:
        nonlocal best
        if len(bins) >= best:
            return
        # Volume lower bound on the bins still needed.
        used = sum(bins)
        lower = len(bins) + max(
            0, -((used + sum(items[index:]) - len(bins) * capacity) // -capacity)
        )
        if index == len(items):
            best = min(best, len(bins))
            return
        if lower >= best:
            return
        length = items[index]
        tried: set[int] = set()
        for i, load in enumerate(bins):
            if load + length <= capacity and load not in tried:
                tried.add(load)
                bins[i] += length
                search(index + 1, bins)
                bins[i] -= length
        bins.append(length)
        search(index + 1, bins)
        bins.pop()

    search(0, [])
    return best
