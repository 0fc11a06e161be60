"""Corpus curation and training-run operations toolkit.

Building blocks for preparing LLM pre-training corpora and keeping an eye
on the runs they feed:

:mod:`corpusops.corpus`
    canonical document record model and newline-delimited JSON streaming.

:mod:`corpusops.dedup`
    exact dedup (Bloom filter) and near-dedup (13-gram MinHash, LSH
    banding, union-find clustering, representative selection).

:mod:`corpusops.mix`
    duplication-bucket upsampling weights and mix-manifest math.

:mod:`corpusops.transforms`
    fill-in-the-middle rearrangement, repository topological ordering and
    concatenation, QA-append formatting.

:mod:`corpusops.packing`
    online best-fit packing of documents into fixed-length sequences with
    zero truncation.

:mod:`corpusops.runwatch`
    robust z-score spike scoring, dual-threshold detection, rollback
    computation, webhook notification.

:mod:`corpusops.recipe`
    hyperparameter and schedule calculator (averaging timescale, batch
    alignment, learning-rate schedules, stage-plan validation).

:mod:`corpusops.evalstats`
    unbiased pass@k and sentence-level memorization scoring.
"""

__version__ = "0.1.0"

__all__ = [
    "corpus",
    "dedup",
    "evalstats",
    "mix",
    "packing",
    "recipe",
    "runwatch",
    "transforms",
]
