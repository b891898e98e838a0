# Meta-evaluation: how well does a metric's score matrix track human
# judgments? Summary-level (per-document) and system-level (aggregated)
# correlations, plus a paired bootstrap significance test.

import numpy as np

from acueval import (PreferencePair, ScoreMatrix, significance,
                     summary_level, system_level, tau_like)

rng = np.random.default_rng(7)
n_docs, n_systems = 60, 6
docs = [f"doc{i}" for i in range(n_docs)]
systems = [f"sys{j}" for j in range(n_systems)]

# Synthetic world: human scores, a metric that tracks them with noise, and a
# metric that is pure noise.
human = rng.random((n_docs, n_systems))
good = np.clip(human + 0.15 * rng.standard_normal((n_docs, n_systems)), 0, 1)
noise = rng.random((n_docs, n_systems))

H = ScoreMatrix(docs, systems, human)
M_good = ScoreMatrix(docs, systems, good)
M_noise = ScoreMatrix(docs, systems, noise)

for name, M in [("good metric", M_good), ("noise metric", M_noise)]:
    summary = summary_level(H, M, "kendall_b")
    system = system_level(H, M, "kendall_b")
    print(f"{name}: summary tau-b = {summary.value:+.3f} "
          f"(rows used {summary.rows_used}, skipped {summary.rows_skipped_constant}), "
          f"system tau-b = {system.value:+.3f}")

# Does the good metric beat the noise metric significantly?
p = significance(H, M_good, M_noise, level="summary",
                 coefficient="kendall_b", resamples=1000, seed=0)
print(f"\npaired bootstrap p (good vs noise, summary level) = {p:.4f}"
      f" {'< 0.05: significant' if p < 0.05 else ''}")

# Segment-level preference concordance, used for relative-ranking benchmarks:
# each pair says which output a human preferred and what the metric scored.
pairs = [PreferencePair(f"d{i}", "sysA", "sysB",
                        (float(s[0]), float(s[1])))
         for i, s in enumerate(rng.random((40, 2)))]
print(f"preference concordance on random pairs = {tau_like(pairs):+.3f}")
