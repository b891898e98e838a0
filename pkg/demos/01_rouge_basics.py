# Lexical overlap scoring from the ground up: tokenization, n-gram ROUGE,
# and LCS-based ROUGE-L.

from acueval import rouge_avg, rouge_l, rouge_n, tokenize

candidate = "The council approved the transit budget on Monday."
reference = "The city council approved the transit budget, freezing fares."

# Default tokenization lowercases and splits on non-alphanumeric runs.
cand = tokenize(candidate)
ref = tokenize(reference)
print("candidate tokens:", cand.tokens)
print("reference tokens:", ref.tokens)

# ROUGE-1 and ROUGE-2: clipped n-gram overlap.
for order in (1, 2):
    score = rouge_n(cand, ref, order)
    print(f"ROUGE-{order}: P={score.precision:.3f} R={score.recall:.3f} "
          f"F1={score.f1:.3f}")

# ROUGE-L: longest common subsequence over the whole sequences.
score = rouge_l(cand, ref)
print(f"ROUGE-L: P={score.precision:.3f} R={score.recall:.3f} F1={score.f1:.3f}")

# The mean of the three F1 values is the lexical pre-training signal used
# by the ablation scorer.
print(f"mean R-1/R-2/R-L F1: {rouge_avg(candidate, reference):.3f}")

# Stemming is opt-in; it folds inflected forms together.
print("stemmed:", tokenize("The councils were approving budgets", stem=True).tokens)
