# The two-stage metric end to end: extract atomic content units from the
# reference, check each one against a candidate summary, aggregate.
#
# Model backends are pluggable; this demo uses the deterministic rule-based
# fallbacks so it runs anywhere.

from acueval import (FixtureExtractor, LexicalChecker, SentenceExtractor,
                     two_stage_f1, two_stage_recall)

reference = ("Marseille prosecutor says so far no videos were used in the "
             "crash investigation despite media reports.")

# Stage 1: a real deployment calls a fine-tuned seq2seq extractor. Here a
# fixture replays a hand-written decomposition of the reference.
extractor = FixtureExtractor({reference: [
    "Marseille prosecutor says so far no videos were used in the crash investigation",
    "the prosecutor is from Marseille",
    "there were media reports about videos",
]})

candidate = ("A prosecutor from Marseille says no videos were used so far "
             "in the crash investigation.")

# Stage 2: the lexical checker judges a unit present when enough of its
# stemmed content tokens appear in the candidate.
result = two_stage_recall(reference, candidate, extractor, LexicalChecker())

print(f"recall = {result.recall:.3f}   (fraction of units conveyed)")
print("per-unit audit trail:")
for acu, judgment in zip(result.acus, result.judgments):
    mark = "+" if judgment.label else "-"
    print(f"  [{mark}] p={judgment.probability:.2f}  {acu.text}")

# The F1 variant runs both directions and combines them by harmonic mean.
# A generic sentence-split extractor stands in for the model here.
paraphrase = ("A prosecutor from Marseille says that so far no videos were "
              "used in the crash investigation, despite reports in the media.")
f1 = two_stage_f1(reference, paraphrase, SentenceExtractor(), LexicalChecker())
print(f"\nsymmetric F1 (sentence-unit fallback extractor) = {f1:.3f}")
