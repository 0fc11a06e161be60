"""Shared generators and independent oracles used across the test suite.

Everything here is deliberately naive (set arithmetic, exhaustive
enumeration, quadratic scans) so it can serve as an oracle for the
production implementations without sharing their code paths.
"""

from __future__ import annotations

import itertools
import math
import random

# ---------------------------------------------------------------------------
# Jaccard / shingle-set generators


def exact_jaccard(a, b) -> float:
    a, b = set(a), set(b)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def fresh_token(rng: random.Random) -> str:
    return f"t{rng.randrange(10**12)}"


def shingle_pair_with_jaccard(rng: random.Random, target_j: float, union_size: int):
    """Two disjointly-built shingle sets whose exact Jaccard ~= target_j."""
    n_shared = round(target_j * union_size)
    n_only = union_size - n_shared
    n_a_only = n_only // 2
    shared = [fresh_token(rng) for _ in range(n_shared)]
    a = shared + [fresh_token(rng) for _ in range(n_a_only)]
    b = shared + [fresh_token(rng) for _ in range(n_only - n_a_only)]
    return a, b


# ---------------------------------------------------------------------------
# Planted near-duplicate corpora and a single-linkage clustering oracle


def random_words(rng: random.Random, n: int) -> list[str]:
    return [fresh_token(rng) for _ in range(n)]


def mutate_document(rng: random.Random, words: list[str]) -> list[str]:
    """A near-duplicate of ``words``: <= 10% of the words change."""
    kind = rng.choice(["copy", "append", "truncate", "edge_swap"])
    out = list(words)
    if kind == "append":
        out += random_words(rng, rng.randint(1, 6))
    elif kind == "truncate":
        out = out[: len(out) - rng.randint(1, 6)]
    elif kind == "edge_swap":
        pos = rng.randint(0, 4) if rng.random() < 0.5 else rng.randint(len(out) - 5, len(out) - 1)
        out[pos] = fresh_token(rng)
    return out


def planted_corpus(rng: random.Random, n_groups: int, group_size: int, n_singletons: int):
    """(id -> text) map containing near-duplicate groups plus singletons."""
    docs: dict[str, str] = {}
    for g in range(n_groups):
        base = random_words(rng, rng.randint(120, 180))
        docs[f"g{g}m0"] = " ".join(base)
        for m in range(1, group_size):
            docs[f"g{g}m{m}"] = " ".join(mutate_document(rng, base))
    for s in range(n_singletons):
        docs[f"s{s}"] = " ".join(random_words(rng, rng.randint(80, 200)))
    return docs


def single_linkage_clusters(ids, similarity, threshold: float):
    """Connected components of the >=threshold similarity graph (BFS).

    Returns the components with at least two members, each as a frozenset.
    """
    ids = list(ids)
    adjacency = {i: [] for i in ids}
    for x, y in itertools.combinations(ids, 2):
        if similarity(x, y) >= threshold:
            adjacency[x].append(y)
            adjacency[y].append(x)
    seen: set = set()
    components = []
    for start in ids:
        if start in seen:
            continue
        queue, component = [start], {start}
        seen.add(start)
        while queue:
            for nxt in adjacency[queue.pop()]:
                if nxt not in component:
                    component.add(nxt)
                    seen.add(nxt)
                    queue.append(nxt)
        if len(component) >= 2:
            components.append(frozenset(component))
    return set(components)


# ---------------------------------------------------------------------------
# Quadratic-time reference for rolling median / MAD / spike z-score


def reference_rolling_median(series, t: int, window: int) -> float:
    lo = max(0, t - window + 1)
    chunk = sorted(series[lo : t + 1])
    mid = len(chunk) // 2
    if len(chunk) % 2:
        return chunk[mid]
    return (chunk[mid - 1] + chunk[mid]) / 2


def reference_spike_scores(series, window: int, mad_floor: float):
    """(median, mad, z) per step, recomputed from scratch each step."""
    medians = [reference_rolling_median(series, t, window) for t in range(len(series))]
    out = []
    for t in range(len(series)):
        lo = max(0, t - window + 1)
        deviations = sorted(
            abs(series[s] - medians[s]) for s in range(lo, t + 1)
        )
        mid = len(deviations) // 2
        if len(deviations) % 2:
            mad = deviations[mid]
        else:
            mad = (deviations[mid - 1] + deviations[mid]) / 2
        z = (series[t] - medians[t]) / (1.4826 * max(mad, mad_floor))
        out.append((medians[t], mad, z))
    return out


# ---------------------------------------------------------------------------
# Step-by-step best-fit packing reference (naive list scan, no indexing)


def reference_pack(lengths, capacity: int, max_open_bins: int):
    """Literal transcription of the online best-fit policy.

    Returns (list of (entries, padding), skipped_count) where entries are
    the item indices placed in each emitted bin, in placement order.
    """
    open_bins: list[dict] = []  # {"entries": [...], "used": int, "order": int}
    emitted = []
    skipped = 0
    opened = 0

    def seal(bin_):
        emitted.append((bin_["entries"], capacity - bin_["used"]))

    for idx, length in enumerate(lengths):
        if length > capacity:
            skipped += 1
            continue
        best = None
        for b in open_bins:
            remaining = capacity - b["used"]
            if length <= remaining:
                if best is None:
                    best = b
                else:
                    best_rem = capacity - best["used"]
                    if remaining < best_rem or (
                        remaining == best_rem and b["order"] < best["order"]
                    ):
                        best = b
        if best is None:
            if len(open_bins) >= max_open_bins:
                fullest = min(
                    open_bins, key=lambda b: (capacity - b["used"], b["order"])
                )
                open_bins.remove(fullest)
                seal(fullest)
            best = {"entries": [], "used": 0, "order": opened}
            opened += 1
            open_bins.append(best)
        best["entries"].append(idx)
        best["used"] += length
        if best["used"] == capacity:
            open_bins.remove(best)
            seal(best)

    for b in sorted(open_bins, key=lambda b: b["order"]):
        seal(b)
    return emitted, skipped


# ---------------------------------------------------------------------------
# Fill-in-the-middle round-trip oracle


def reconstruct_fim(transformed, config):
    """Detect the FIM layout from the leading token and reassemble."""
    p, m, s = config.token_prefix, config.token_middle, config.token_suffix
    assert transformed.count(p) == transformed.count(m) == transformed.count(s) == 1
    if transformed.startswith(p):  # PSM: <p>P<s>S<m>M
        rest = transformed[len(p):]
        prefix, rest = rest.split(s, 1)
        suffix, middle = rest.split(m, 1)
    else:  # SPM: <s>S<p>P<m>M
        assert transformed.startswith(s)
        rest = transformed[len(s):]
        suffix, rest = rest.split(p, 1)
        prefix, middle = rest.split(m, 1)
    return prefix + middle + suffix


# ---------------------------------------------------------------------------
# pass@k enumeration oracle


def enumerated_pass_at_k(n: int, c: int, k: int) -> float:
    """Fraction of size-k subsets of n attempts containing >= 1 correct."""
    attempts = [True] * c + [False] * (n - c)
    subsets = list(itertools.combinations(range(n), k))
    hits = sum(1 for subset in subsets if any(attempts[i] for i in subset))
    return hits / len(subsets)


def binomial_pass_at_k(n: int, c: int, k: int) -> float:
    """Closed form 1 - C(n-c, k)/C(n, k) via exact integer comb."""
    if n - c < k:
        return 1.0
    return 1.0 - math.comb(n - c, k) / math.comb(n, k)
