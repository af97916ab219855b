"""
Evaluation and Era Comparison
=============================

Scores predictions against gold labels: per-era confusion matrices over
the 8 labels plus a reserved invalid column, per-class precision/recall/
F1, accuracy, macro-F1, and pairwise two-sided Fisher exact tests on the
per-era accuracy counts.
"""

import random

from nlikit.corpus import Era
from nlikit.evalstats import (
    PredictionRecord,
    confusion_matrix,
    era_report,
    metrics,
    metrics_csv,
)
from nlikit.labels import L1_LABELS, parse_label

print("Evaluation demo")
print("=" * 40)

###############################################################################
# Synthetic predictions that degrade over time
# --------------------------------------------
# The later the era, the noisier the predictions, with occasional
# out-of-set outputs landing in the invalid column.

rng = random.Random(11)
records = []
noise_by_era = {Era.PRE_NN: 0.25, Era.PRE_LLM: 0.35, Era.POST_LLM: 0.45}
for era, noise in noise_by_era.items():
    for label in L1_LABELS:
        for i in range(50):
            roll = rng.random()
            if roll < noise * 0.15:
                raw = "cannot tell"  # invalid output
            elif roll < noise:
                raw = rng.choice([x for x in L1_LABELS if x != label])
            else:
                raw = label
            records.append(
                PredictionRecord(f"{era.value}-{label}-{i}", era, label, parse_label(raw))
            )

###############################################################################
# Per-era metrics
# ---------------

report = era_report(records, alpha=0.05)
for era, era_metrics in report.metrics.items():
    cm = report.matrices[era]
    invalid = int(cm.counts[:, 8].sum())
    print(f"\n{era.value}: accuracy={era_metrics.accuracy:.3f} "
          f"macro_f1={era_metrics.macro_f1:.3f} invalid_outputs={invalid}")

###############################################################################
# Are the era differences significant?
# ------------------------------------
# Fisher's exact test on correct/incorrect counts, two-sided, alpha 0.05.

print()
for (era_a, era_b), result in report.fisher.items():
    verdict = "significant" if result.significant else "not significant"
    print(f"{era_a.value} vs {era_b.value}: p={result.p_value:.4f} ({verdict})")

###############################################################################
# Flat exports
# ------------
# The same report serializes to JSON and CSV for plotting elsewhere.

print("\nmetrics.csv head:")
for line in metrics_csv(report).splitlines()[:5]:
    print(f"  {line}")

###############################################################################
# Single-matrix use
# -----------------

pre_nn = [r for r in records if r.era is Era.PRE_NN]
single = metrics(confusion_matrix(pre_nn))
print(f"\nstandalone pre-nn chinese: {single.per_class['chinese']}")
