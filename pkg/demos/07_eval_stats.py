"""Coverage curves with pass@k and sentence-level memorization scoring."""

import random

from corpusops.evalstats import (
    SentencePair,
    mean_over_runs,
    memorization_rate,
    pass_at_k,
    split_sentences,
)

# pass@k grows with k: even a 10%-accurate sampler covers most problems
# at k=64 if its successes are spread out.
print("pass@k for n=64 attempts:")
print(f"{'c':>4} " + "".join(f"k={k:<8}" for k in (1, 4, 16, 64)))
for c in (0, 2, 6, 16, 48):
    row = " ".join(f"{pass_at_k(64, c, k):7.3f} " for k in (1, 4, 16, 64))
    print(f"{c:>4} {row}")

# Averaging over evaluation runs.
rng = random.Random(0)
runs = [pass_at_k(64, rng.randint(4, 10), 16) for _ in range(64)]
print(f"\nmean pass@16 over 64 runs: {mean_over_runs(runs):.3f}")

# Memorization: split a question into sentences, score generated
# continuations by byte-exact match (trailing whitespace ignored).
question = (
    "Let N be the number of ordered triples. "
    "Each entry is a positive integer at most 12. "
    "Find the remainder when N is divided by 1000."
)
sentences = split_sentences(question)
print(f"\nquestion splits into {len(sentences)} sentences:")
for s in sentences:
    print(f"  - {s}")

generated = [
    "Let N be the number of ordered triples.",   # verbatim: memorized
    "Each entry is a positive integer below 12.",  # near miss: not counted
    "Find the remainder when N is divided by 1000.\n",  # trailing \n ok
]
pairs = [SentencePair(ref, gen) for ref, gen in zip(sentences, generated)]
print(f"\nmemorization rate: {memorization_rate(pairs):.1f}%")
