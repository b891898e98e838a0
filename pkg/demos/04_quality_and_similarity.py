# Two analyses over content units and candidates:
#   1. greedy-matching quality of automatically extracted units against
#      human-written ones,
#   2. how similar a dataset's candidate summaries are to each other.

import tempfile
from pathlib import Path

from acueval import AcuSet, EvalExample, acu_quality, candidate_similarity
from acueval.metaeval import write_histogram_csv

generated = AcuSet.from_texts([
    "the council approved the budget",
    "fares stay frozen next year",
    "the mayor attended the session",
])
human = AcuSet.from_texts([
    "the city council approved the transit budget",
    "the plan freezes fares through next year",
    "new bus routes will be added",
])

# Each generated unit is matched to its best reference unit (and vice
# versa); no one-to-one assignment is enforced.
for matcher in ("rouge1", "rouge2", "rougeL"):
    q = acu_quality(generated, human, matcher=matcher)
    print(f"{matcher:>7}: P={100 * q.precision:.2f} R={100 * q.recall:.2f} "
          f"F1={100 * q.f1:.2f}")

# Candidate similarity: unigram F1 over every unordered candidate pair of
# the same example, pooled across the dataset.
examples = [
    EvalExample(example_id="e1", source="", reference="the reference text",
                candidates={
                    "a": "The council approved the transit budget.",
                    "b": "The transit budget was approved by the council.",
                    "c": "Weather delayed several flights this morning.",
                }),
    EvalExample(example_id="e2", source="", reference="another reference",
                candidates={
                    "a": "Researchers tracked orcas for six weeks.",
                    "b": "Orcas were tracked by researchers for six weeks.",
                    "c": "The library extended its opening hours.",
                }),
]
dist = candidate_similarity(examples)
print(f"\n{len(dist.values)} candidate pairs: mean={dist.mean:.3f} "
      f"q1={dist.q1:.3f} median={dist.median:.3f} q3={dist.q3:.3f}")

out = Path(tempfile.mkdtemp(prefix="candidate-sim-")) / "hist.csv"
write_histogram_csv(dist, out, bins=10)
print(f"histogram written to {out}")
