"""Human review loop: sampling candidates, journaling verdicts, consensus.

Detection quality is bounded by threshold choices, and threshold choices are
bounded by labels. This module implements the iteration that closes the
loop: pull the strongest responses for archetype review, pull a band of
moderate responses for boundary review, persist verdicts durably, and reduce
multi-reviewer verdicts to consensus labels fit for tuning and evaluation.
"""

from __future__ import annotations

import json
import os
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable

import numpy as np

from .classifier import DetectedPeak, DetectionReport
from .spectra import ParseError


class Verdict(str, Enum):
    DIFFRACTION = "Diffraction"
    NOT_DIFFRACTION = "NotDiffraction"
    AMBIGUOUS = "Ambiguous"


@dataclass(frozen=True)
class LabelRecord:
    """One reviewer's verdict on one peak at one moment."""

    dataset: str
    location_id: int
    center_channel: int
    verdict: Verdict
    labeler: str
    timestamp: str

    @property
    def peak_key(self) -> tuple[str, int, int]:
        return (self.dataset, self.location_id, self.center_channel)


@dataclass(frozen=True)
class ConsensusLabel:
    """Reduced multi-reviewer verdict for one peak."""

    dataset: str
    location_id: int
    center_channel: int
    verdict: Verdict
    support: int


@dataclass
class SampleResult:
    """Sampler output; short means fewer peaks were available than asked."""

    peaks: list[DetectedPeak]
    short: bool


def now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def sample_high_response(report: DetectionReport, k: int) -> SampleResult:
    """The k highest-t candidates, the archetypes worth human eyes first.

    Deterministic: ties in t_abs resolve by (location_id, center_channel).
    When the report holds fewer than k candidates, all of them come back and
    the result is flagged short.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    ordered = sorted(report.peaks, key=lambda p: (-p.t_abs, p.location_id, p.center_channel))
    return SampleResult(peaks=ordered[:k], short=len(ordered) < k)


def sample_edge_cases(
    report: DetectionReport, t_center: float, band: float, k: int, seed: int
) -> SampleResult:
    """Seeded uniform draw of candidates near a score of interest.

    Filters candidates to |t_abs - t_center| <= band, then samples up to k of
    them without replacement. Reproducible for a fixed seed. An empty band
    yields an empty, short-flagged result.
    """
    if band <= 0:
        raise ValueError(f"band must be positive, got {band}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    in_band = [p for p in report.peaks if abs(p.t_abs - t_center) <= band]
    in_band.sort(key=lambda p: (p.location_id, p.center_channel))
    if len(in_band) <= k:
        return SampleResult(peaks=in_band, short=len(in_band) < k)
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(in_band), size=k, replace=False)
    return SampleResult(peaks=[in_band[i] for i in sorted(idx)], short=False)


def _record_to_line(rec: LabelRecord) -> str:
    return json.dumps(
        {
            "dataset": rec.dataset,
            "location_id": rec.location_id,
            "center_channel": rec.center_channel,
            "verdict": rec.verdict.value,
            "labeler": rec.labeler,
            "timestamp": rec.timestamp,
        },
        separators=(",", ":"),
    )


def _line_to_record(line: str) -> LabelRecord:
    obj = json.loads(line)
    return LabelRecord(
        dataset=str(obj["dataset"]),
        location_id=int(obj["location_id"]),
        center_channel=int(obj["center_channel"]),
        verdict=Verdict(obj["verdict"]),
        labeler=str(obj["labeler"]),
        timestamp=str(obj["timestamp"]),
    )


class LabelStore:
    """Append-only JSONL journal of label records.

    Journal order is authoritative: for one (peak, labeler) pair the record
    appended last wins. The full history stays on disk for audit; compact()
    is the explicit maintenance step that drops superseded lines. A corrupt
    final line (torn write) is truncated with a warning on open; corruption
    anywhere else is an error, since silent repair would drop good records.
    """

    def __init__(self, path: str, known_keys: set[tuple[str, int, int]] | None = None):
        self.path = path
        self.known_keys = known_keys
        self._records: list[LabelRecord] = []
        if os.path.exists(path):
            self._recover()

    def _recover(self) -> None:
        with open(self.path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        good: list[LabelRecord] = []
        for i, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                good.append(_line_to_record(line))
            except (json.JSONDecodeError, KeyError, ValueError) as e:
                if i == len(lines) - 1:
                    warnings.warn(
                        f"label journal {self.path}: dropping corrupt trailing line {i + 1}",
                        stacklevel=2,
                    )
                    with open(self.path, "w", encoding="utf-8") as fh:
                        fh.write("".join(l + "\n" for l in lines[:i]))
                    break
                raise ParseError(f"label journal {self.path}: corrupt line {i + 1}: {e}") from e
        self._records = good

    def record(self, rec: LabelRecord) -> None:
        """Append one verdict; validates the peak when a key set is known.

        Raises:
            ValueError: the record references a peak outside known_keys.
        """
        if self.known_keys is not None and rec.peak_key not in self.known_keys:
            raise ValueError(f"unknown peak {rec.dataset}/{rec.location_id}:{rec.center_channel}")
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(_record_to_line(rec) + "\n")
            fh.flush()
        self._records.append(rec)

    def records(self) -> list[LabelRecord]:
        return list(self._records)

    def latest(self) -> dict[tuple[str, int, int], dict[str, LabelRecord]]:
        """Current verdict per (peak, labeler), journal order winning."""
        out: dict[tuple[str, int, int], dict[str, LabelRecord]] = {}
        for rec in self._records:
            out.setdefault(rec.peak_key, {})[rec.labeler] = rec
        return out

    def consensus(self) -> list[ConsensusLabel]:
        return consensus_labels(self._records)

    def compact(self) -> int:
        """Rewrite the journal to the latest record per (peak, labeler).

        Keeps the surviving records in their original append order. Returns
        the number of superseded lines dropped.
        """
        latest: dict[tuple[tuple[str, int, int], str], LabelRecord] = {}
        for rec in self._records:
            latest[(rec.peak_key, rec.labeler)] = rec
        keep_ids = {id(rec) for rec in latest.values()}
        survivors = [rec for rec in self._records if id(rec) in keep_ids]
        dropped = len(self._records) - len(survivors)
        tmp = self.path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write("".join(_record_to_line(r) + "\n" for r in survivors))
        os.replace(tmp, self.path)
        self._records = survivors
        return dropped


def consensus_labels(records: Iterable[LabelRecord]) -> list[ConsensusLabel]:
    """Reduce verdicts to consensus labels, order-independent in the input.

    For each peak: take each labeler's latest verdict; a consensus exists
    only with at least two labelers and a strict majority verdict, and the
    majority must itself hold at least two supporters. Single-label peaks
    and even splits yield nothing, by design: one opinion is not ground
    truth and a tie is not a determination.
    """
    per_peak: dict[tuple[str, int, int], dict[str, Verdict]] = {}
    for rec in records:
        per_peak.setdefault(rec.peak_key, {})[rec.labeler] = rec.verdict
    out = []
    for key in sorted(per_peak):
        verdicts = per_peak[key]
        n = len(verdicts)
        if n < 2:
            continue
        counts: dict[Verdict, int] = {}
        for v in verdicts.values():
            counts[v] = counts.get(v, 0) + 1
        winner, support = max(counts.items(), key=lambda kv: kv[1])
        if support * 2 <= n or support < 2:
            continue
        out.append(
            ConsensusLabel(
                dataset=key[0],
                location_id=key[1],
                center_channel=key[2],
                verdict=winner,
                support=support,
            )
        )
    return out


def tuning_pairs(store: LabelStore, report: DetectionReport) -> list[tuple[float, bool]]:
    """Join journal verdicts to report scores as tune_threshold input.

    Uses each labeler's latest verdict per peak; Ambiguous verdicts are
    excluded (ambiguity is a phenomenon, not a soft label), and records for
    peaks absent from the report are skipped with a warning since they
    cannot be scored.
    """
    by_key = {(report.dataset, p.location_id, p.center_channel): p for p in report.peaks}
    pairs = []
    skipped = 0
    for key, per_labeler in store.latest().items():
        peak = by_key.get(key)
        for rec in per_labeler.values():
            if rec.verdict is Verdict.AMBIGUOUS:
                continue
            if peak is None:
                skipped += 1
                continue
            pairs.append((peak.t_abs, rec.verdict is Verdict.DIFFRACTION))
    if skipped:
        warnings.warn(f"skipped {skipped} label(s) for peaks not present in the report", stacklevel=2)
    return pairs
