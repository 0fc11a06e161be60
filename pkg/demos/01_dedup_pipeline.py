"""Walk a small corpus through both deduplication stages.

We plant exact copies and near-duplicates of a handful of base documents,
run Bloom-filter exact dedup first, then MinHash/LSH near-dedup, and look
at the surviving documents and the cluster report.
"""

import random

from corpusops.corpus import Document
from corpusops.dedup import BloomConfig, NearDupConfig, exact_dedup, near_dedup

rng = random.Random(0)


def sentence(n_words):
    return " ".join(f"w{rng.randrange(5000)}" for _ in range(n_words))


# Build a corpus: 5 base articles, each with one exact copy and one lightly
# edited copy, plus 20 unrelated documents.
docs = []
for b in range(5):
    base = sentence(150)
    docs.append(Document(id=f"base{b}", text=base, curated=True, timestamp="2024-05-01"))
    docs.append(Document(id=f"copy{b}", text=base))  # exact duplicate
    docs.append(Document(id=f"edit{b}", text=base + " trailing update note"))
for u in range(20):
    docs.append(Document(id=f"unique{u}", text=sentence(120)))

print(f"corpus: {len(docs)} documents "
      f"(5 bases x [original + exact copy + near copy] + 20 unique)")

# Stage 1: exact dedup drops byte-identical (after normalization) copies.
kept_stream, stats = exact_dedup(docs, BloomConfig(capacity=1000, target_fpr=0.001))
survivors = list(kept_stream)
print(f"\nexact dedup: seen={stats.seen} dropped={stats.dropped}")
print(f"  survivors: {len(survivors)} (the 5 exact copies are gone)")

# Stage 2: near dedup clusters the lightly edited variants.
kept, clusters = near_dedup(survivors, NearDupConfig(perm_seed=7))
print(f"\nnear dedup: kept={len(kept)} clusters={len(clusters)}")
for record in clusters:
    print(f"  cluster size {record.size}: members={list(record.members)} "
          f"-> representative {record.representative}")

# Curated + newer documents win representative selection, and the survivor
# records the cluster size in dup_count for downstream mix weighting.
promoted = {d.id: d.dup_count for d in kept if d.dup_count > 1}
print(f"\ndup_count carried by representatives: {promoted}")
