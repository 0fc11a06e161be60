"""From duplication statistics to a weighted sampling plan.

Duplicate-cluster sizes land in coarse buckets; CommonCrawl buckets get a
graded upsampling weight (1/3/5/8/10) while other sources get a flat 2
once duplicated.  The manifest turns raw token counts into proportions of
the weighted token mass, and sample_plan rounds them to integer quotas.
"""

from corpusops.corpus import SourceClass
from corpusops.mix import (
    DupBucket,
    GroupStat,
    bucket_of,
    build_manifest,
    sample_plan,
    weight_of,
)

print("bucket boundaries:")
for count in (1, 2, 5, 6, 100, 101, 1000, 1001):
    print(f"  dup_count {count:>5} -> {bucket_of(count).value}")

print("\nupsampling weights (CommonCrawl vs curated):")
for bucket in DupBucket:
    cc = weight_of(bucket, SourceClass.COMMON_CRAWL)
    cur = weight_of(bucket, SourceClass.CURATED)
    print(f"  {bucket.value:>9}: cc={cc:>2}  curated={cur}")

stats = [
    GroupStat("cc/unique", 9_000, DupBucket.B1, SourceClass.COMMON_CRAWL),
    GroupStat("cc/dup-2-5", 2_000, DupBucket.B2_5, SourceClass.COMMON_CRAWL),
    GroupStat("cc/dup-6-100", 800, DupBucket.B6_100, SourceClass.COMMON_CRAWL),
    GroupStat("papers", 1_500, DupBucket.B1, SourceClass.CURATED),
    GroupStat("code", 2_500, DupBucket.B2_5, SourceClass.CODE),
]
manifest = build_manifest(stats)

print("\nmanifest (weight x tokens -> share of the mix):")
for row in manifest.rows:
    print(f"  {row.group:<14} tokens={row.tokens:>6} w={row.weight:>2} "
          f"weighted={row.weighted_tokens:>6} share={row.proportion:.4f}")

target = 1_000_000
plan = sample_plan(manifest, target)
print(f"\nsampling quotas for a {target:,}-token budget:")
for group, quota in plan.items():
    print(f"  {group:<14} {quota:>9,}")
print(f"  total: {sum(plan.values()):,} (exactly the target)")
