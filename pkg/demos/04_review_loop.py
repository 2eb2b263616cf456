"""The human review loop: sample, judge, journal, reduce to consensus.

Candidates from a detection run are pulled two ways (strongest responses
first, then a band around the decision threshold where labels matter most),
judged by three simulated reviewers of varying reliability, journaled, and
reduced to consensus labels. Ends with journal compaction.
"""

import os
import tempfile

import numpy as np

from xrf_anomaly import (
    LabelRecord,
    LabelStore,
    Verdict,
    detect,
    now_iso,
    sample_edge_cases,
    sample_high_response,
    standard_benchmark,
)

ds, truth = standard_benchmark(2)
report = detect(ds)
truth_by_id = truth.by_id()

# Archetype pass: the unmistakable cases, for calibrating reviewer intuition.
strong = sample_high_response(report, k=5)
print("strongest responses:")
for p in strong.peaks:
    print(f"  {p.key:>10}  t={p.t_abs:7.2f}  {p.anomaly_class.value}")

# Edge-case pass: a seeded draw near the decision threshold.
edge = sample_edge_cases(report, t_center=7.0, band=2.0, k=8, seed=4)
print(f"edge cases near t=7.0: {len(edge.peaks)} drawn"
      + (" (short: fewer available than asked)" if edge.short else ""))

rng = np.random.default_rng(9)
store = LabelStore(os.path.join(tempfile.mkdtemp(prefix="xrf-demo-"), "labels.jsonl"))


def true_verdict(peak):
    injected = truth_by_id[peak.location_id].diffraction
    hit = any(abs(peak.center_channel - c) <= 13 for c, _ in injected)
    return Verdict.DIFFRACTION if hit else Verdict.NOT_DIFFRACTION


# Three reviewers: two careful, one who flips a coin on a tenth of the calls.
for peak in strong.peaks + edge.peaks:
    truth_v = true_verdict(peak)
    for name, flip_rate in (("ana", 0.0), ("ben", 0.0), ("cory", 0.1)):
        v = truth_v
        if rng.random() < flip_rate:
            v = Verdict.AMBIGUOUS
        store.record(LabelRecord(report.dataset, peak.location_id,
                                 peak.center_channel, v, name, now_iso()))

# One reviewer reconsiders a call; the journal keeps both, the latest wins.
first = strong.peaks[0]
store.record(LabelRecord(report.dataset, first.location_id, first.center_channel,
                         true_verdict(first), "cory", now_iso()))

labels = store.consensus()
print(f"{len(store.records())} journal records -> {len(labels)} consensus labels")
for label in labels[:5]:
    print(f"  {label.location_id}:{label.center_channel}  "
          f"{label.verdict.value} (support {label.support}/3)")

dropped = store.compact()
print(f"compaction dropped {dropped} superseded record(s), "
      f"{len(store.records())} kept")
