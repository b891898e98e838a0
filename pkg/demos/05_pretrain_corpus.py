# Building a pre-training corpus for the one-stage metric: score candidate
# summaries with the two-stage pipeline and emit regression targets as
# JSONL shards.

import tempfile
from pathlib import Path

from acueval import LexicalChecker, SentenceExtractor, build_corpus, write_corpus

references = {
    "e1": "The council approved the transit budget. Fares stay frozen.",
    "e2": "Researchers tracked orcas for six weeks near the coast.",
}
# In production these come from a summarization model sampling several
# candidates per document (or from the sidecar's /v1/generate endpoint).
candidates = {
    "e1": [
        "The council approved the transit budget and froze fares.",
        "The transit budget was approved.",
        "Fares stay frozen for now.",
        "A committee discussed various matters.",
    ],
    "e2": [
        "Researchers tracked orcas for six weeks.",
        "Orcas were observed near the coast.",
        "Whales travelled far.",
        "The study lasted six weeks and tracked orcas near the coast.",
    ],
}

records = build_corpus(candidates, references, scorer="two_stage",
                       extractor=SentenceExtractor(), checker=LexicalChecker())

print(f"{len(records)} training records:")
for r in records:
    print(f"  {r.example_id} rank {r.candidate_rank}: "
          f"target={r.target_score:.3f}  {r.candidate[:50]!r}")

out_dir = Path(tempfile.mkdtemp(prefix="pretrain-demo-"))
paths = write_corpus(records, out_dir)
print(f"\nwrote {len(paths)} shard(s) under {out_dir}")

# The same corpus can alternatively target mean R-1/R-2/R-L F1, the ablation
# signal used to study what the one-stage model should imitate.
ablation = build_corpus(candidates, references, scorer="rouge_avg")
print(f"rouge_avg targets: {[round(r.target_score, 3) for r in ablation[:4]]}")
