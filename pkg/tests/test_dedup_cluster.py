import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpusops.corpus import Document, SourceClass
from corpusops.dedup import (
    ClusterRecord,
    NearDupConfig,
    choose_representative,
    cluster,
    near_dedup,
    normalize,
    shingles,
    signature,
)
from helpers import exact_jaccard, planted_corpus, single_linkage_clusters


def sigs_for(texts, perm_seed=0):
    return {
        doc_id: signature(shingles(normalize(text)), perm_seed)
        for doc_id, text in texts.items()
    }


def make_doc(doc_id, curated=False, timestamp=None, source=SourceClass.COMMON_CRAWL):
    return Document(
        id=doc_id, text="x", curated=curated, timestamp=timestamp, source_class=source
    )


WORDS = " ".join(f"w{i}" for i in range(40))


class TestCluster:
    def test_transitive_union(self):
        texts = {"a": WORDS, "b": WORDS, "c": WORDS}
        records = cluster([("a", "b"), ("b", "c")], sigs_for(texts), 0.8)
        assert len(records) == 1
        assert records[0].members == ("a", "b", "c")
        assert records[0].size == 3

    def test_no_confirmed_pairs(self):
        texts = {
            "a": " ".join(f"a{i}" for i in range(40)),
            "b": " ".join(f"b{i}" for i in range(40)),
        }
        assert cluster([("a", "b")], sigs_for(texts), 0.8) == []

    def test_below_threshold_pair_rejected(self):
        base = [f"w{i}" for i in range(40)]
        texts = {
            "a": " ".join(base),
            "b": " ".join(base[:20] + [f"x{i}" for i in range(20)]),
        }
        assert cluster([("a", "b")], sigs_for(texts), 0.8) == []

    @given(st.randoms(use_true_random=False))
    @settings(max_examples=30, deadline=None)
    def test_pair_order_invariance(self, rng):
        texts = {name: WORDS for name in "abcdefg"}
        signatures = sigs_for(texts)
        pairs = [("a", "b"), ("b", "c"), ("d", "e"), ("f", "g"), ("a", "c")]
        rng.shuffle(pairs)
        records = cluster(pairs, signatures, 0.8)
        assert [r.members for r in records] == [("a", "b", "c"), ("d", "e"), ("f", "g")]

    def test_matches_bruteforce_single_linkage_on_random_corpora(self):
        # Oracle: all-pairs exact Jaccard over shingle sets, single linkage.
        for seed in range(6):
            rng = random.Random(1000 + seed)
            texts = planted_corpus(rng, n_groups=5, group_size=4, n_singletons=20)
            grams = {i: set(shingles(normalize(t))) for i, t in texts.items()}
            expected = single_linkage_clusters(
                texts, lambda x, y: exact_jaccard(grams[x], grams[y]), 0.8
            )
            signatures = sigs_for(texts, perm_seed=seed)
            all_pairs = [
                (a, b)
                for i, a in enumerate(sorted(texts))
                for b in sorted(texts)[i + 1 :]
            ]
            got = {
                frozenset(r.members)
                for r in cluster(all_pairs, signatures, 0.8)
            }
            assert got == expected


class TestClusterRecord:
    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            ClusterRecord(members=("a",), representative="a", size=1)
        with pytest.raises(ValueError):
            ClusterRecord(members=("a", "b"), representative="z", size=2)


class TestChooseRepresentative:
    def test_curated_beats_common_crawl(self):
        docs = {
            "cc": make_doc("cc", curated=False, timestamp="2024-06-01"),
            "cur": make_doc("cur", curated=True, timestamp="2020-01-01"),
        }
        record = ClusterRecord(members=("cc", "cur"), representative="cc", size=2)
        assert choose_representative(record, docs) == "cur"

    def test_newer_beats_older(self):
        docs = {
            "old": make_doc("old", timestamp="2020-05-05"),
            "new": make_doc("new", timestamp="2024-05-05"),
        }
        record = ClusterRecord(members=("new", "old"), representative="new", size=2)
        assert choose_representative(record, docs) == "new"

    def test_all_keys_equal_smallest_id(self):
        docs = {name: make_doc(name) for name in ("b", "a", "c")}
        record = ClusterRecord(members=("a", "b", "c"), representative="a", size=3)
        assert choose_representative(record, docs) == "a"

    def test_missing_timestamp_ranks_oldest(self):
        docs = {
            "undated": make_doc("undated"),
            "dated": make_doc("dated", timestamp="1999-01-01"),
        }
        record = ClusterRecord(members=("dated", "undated"), representative="dated", size=2)
        assert choose_representative(record, docs) == "dated"

    def test_unresolvable_member_errors(self):
        record = ClusterRecord(members=("a", "b"), representative="a", size=2)
        with pytest.raises(KeyError):
            choose_representative(record, {"a": make_doc("a")})


class TestNearDedupPipeline:
    def test_keeps_representative_with_cluster_size(self):
        rng = random.Random(3)
        texts = planted_corpus(rng, n_groups=3, group_size=4, n_singletons=8)
        docs = [Document(id=i, text=t) for i, t in sorted(texts.items())]
        kept, clusters = near_dedup(docs, NearDupConfig(perm_seed=12))
        assert len(clusters) == 3
        kept_ids = {d.id for d in kept}
        for record in clusters:
            assert record.representative in kept_ids
            assert all(m in texts for m in record.members)
            assert sum(m in kept_ids for m in record.members) == 1
        promoted = {d.id: d.dup_count for d in kept if d.dup_count > 1}
        assert promoted == {r.representative: r.size for r in clusters}

    def test_idempotent_on_own_output(self):
        rng = random.Random(9)
        texts = planted_corpus(rng, n_groups=4, group_size=5, n_singletons=10)
        docs = [Document(id=i, text=t) for i, t in sorted(texts.items())]
        config = NearDupConfig(perm_seed=21)
        kept, clusters = near_dedup(docs, config)
        assert clusters
        kept_again, clusters_again = near_dedup(kept, config)
        assert clusters_again == []
        assert kept_again == kept

    def test_empty_after_normalization_passes_through(self):
        docs = [Document(id="p", text="!!! ... ???"), Document(id="q", text="?!")]
        kept, clusters = near_dedup(docs)
        assert [d.id for d in kept] == ["p", "q"]
        assert clusters == []

    def test_duplicate_ids_rejected(self):
        docs = [Document(id="a", text="x"), Document(id="a", text="y")]
        with pytest.raises(ValueError):
            near_dedup(docs)
