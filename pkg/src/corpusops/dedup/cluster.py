"""Union-find clustering of confirmed near-duplicate pairs.

Candidate pairs (from LSH buckets) are confirmed by signature-estimated
Jaccard before being unioned, so banding false positives cannot poison a
cluster.  Connected components with two or more members become
:class:`ClusterRecord`; the output is invariant under any permutation of
the input pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping

from corpusops.corpus import Document
from corpusops.dedup.minhash import Signature, estimate_jaccard

__all__ = ["ClusterRecord", "UnionFind", "choose_representative", "cluster"]


class UnionFind:
    """Disjoint sets over arbitrary hashable keys (path compression + rank)."""

    def __init__(self) -> None:
        self._parent: dict[Hashable, Hashable] = {}
        self._rank: dict[Hashable, int] = {}

    def find(self, x: Hashable) -> Hashable:
        parent = self._parent
        if x not in parent:
            parent[x] = x
            self._rank[x] = 0
            return x
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: Hashable, b: Hashable) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self._rank[ra] < self._rank[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        if self._rank[ra] == self._rank[rb]:
            self._rank[ra] += 1

    def components(self) -> list[set[Hashable]]:
        groups: dict[Hashable, set[Hashable]] = {}
        for x in self._parent:
            groups.setdefault(self.find(x), set()).add(x)
        return list(groups.values())


@dataclass(frozen=True)
class ClusterRecord:
    """A near-duplicate cluster of two or more documents.

    ``members`` is sorted for stable serialization.  ``representative``
    defaults to the smallest member id; :func:`choose_representative`
    applies the source/recency preference when documents are resolvable.
    """

    members: tuple[str, ...]
    representative: str
    size: int

    def __post_init__(self) -> None:
        if self.size != len(self.members):
            raise ValueError("cluster size must equal member count")
        if self.size < 2:
            raise ValueError("emitted clusters must have >= 2 members")
        if self.representative not in self.members:
            raise ValueError("representative must be a cluster member")


def cluster(
    candidate_pairs: Iterable[tuple[str, str]],
    signatures: Mapping[str, Signature],
    confirm_threshold: float = 0.8,
) -> list[ClusterRecord]:
    """Union pairs whose estimated Jaccard clears the threshold.

    Pairs referencing ids without a signature are ignored, as are
    self-pairs.  Components of size >= 2 are returned sorted by smallest
    member id; each record's representative is its smallest member id
    until re-selected.
    """
    if not 0.0 < confirm_threshold < 1.0:
        raise ValueError(
            f"confirm_threshold must be in (0, 1), got {confirm_threshold}"
        )
    forest = UnionFind()
    for a, b in candidate_pairs:
        if a == b or a not in signatures or b not in signatures:
            continue
        if estimate_jaccard(signatures[a], signatures[b]) >= confirm_threshold:
            forest.union(a, b)

    records = []
    for component in forest.components():
        if len(component) < 2:
            continue
        members = tuple(sorted(component))
        records.append(
            ClusterRecord(members=members, representative=members[0], size=len(members))
        )
    records.sort(key=lambda record: record.members[0])
    return records


def choose_representative(
    cluster_record: ClusterRecord,
    lookup: Mapping[str, Document] | Callable[[str], Document],
) -> str:
    """Pick the member to keep: curated first, then newest, then smallest id.

    Documents without a timestamp rank as oldest.  Raises ``KeyError`` if
    any member id cannot be resolved.
    """
    resolve = lookup.__getitem__ if isinstance(lookup, Mapping) else lookup
    docs = [resolve(member_id) for member_id in cluster_record.members]

    # Stable multi-pass sort: final tie-break first.  ISO-8601 dates order
    # lexicographically, so no parsing is needed; missing dates rank oldest.
    docs.sort(key=lambda doc: doc.id)
    docs.sort(key=lambda doc: doc.timestamp or "", reverse=True)
    docs.sort(key=lambda doc: doc.curated, reverse=True)
    return docs[0].id
