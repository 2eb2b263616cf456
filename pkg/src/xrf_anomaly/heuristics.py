"""Window statistics that separate diffraction from other detector anomalies.

The physics: fluorescence is isotropic, so both detectors see the same lines
and any common background. Bragg diffraction is directional, so a diffracted
peak appears in one detector only. Surface roughness attenuates one detector
uniformly across the whole energy range. These facts reduce anomaly hunting
to statistics on the channel-wise difference between the two detectors.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .spectra import Calibration, N_CHANNELS, window_width_channels

# Score assigned when the window difference has zero spread but nonzero mean:
# the evidence for a systematic offset is unbounded, so it outranks every
# finite score while staying JSON-representable.
LARGEST_SCORE = sys.float_info.max


@dataclass(slots=True)
class WindowScore:
    """Statistics of one candidate window centered at center_channel."""

    center_channel: int
    t_abs: float
    dominant_detector: str
    peakedness: float
    baseline_cv: float


@dataclass(slots=True)
class RoughnessResult:
    """Whole-spectrum detector asymmetry summary."""

    score: float
    attenuation_factor: float
    weaker_detector: str


def diffraction_t_statistic(window_a: np.ndarray, window_b: np.ndarray) -> float:
    """Absolute paired t-statistic of the channel-wise detector difference.

    Pairs the two windows channel by channel, d = a - b, and studentizes the
    mean difference: |mean(d)| / (sd(d)/sqrt(n)) with sample sd. A one-sided
    diffraction peak drives |t| up; matched windows hover near zero.

    Degenerate spread is mapped to the boundary of the score scale: if every
    channel agrees exactly the score is 0.0; if the difference is a nonzero
    constant the score is LARGEST_SCORE.
    """
    a = np.asarray(window_a, dtype=np.float64)
    b = np.asarray(window_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise ValueError("windows must be equal-length non-empty 1-d sequences")
    d = a - b
    n = d.size
    mean = d.mean()
    sd = d.std(ddof=1) if n > 1 else 0.0
    if sd == 0.0:
        return 0.0 if mean == 0.0 else LARGEST_SCORE
    return float(abs(mean) / (sd / np.sqrt(n)))


def peakedness(window_a: np.ndarray, window_b: np.ndarray) -> float:
    """Relative height of the detector difference at the window center.

    d = |a - b| channel-wise; returns d_center / mean(d). A genuine peak
    centered in the window scores well above 1; a flat offset scores near 1.
    The 0/0 case (identical windows) is defined as 1.0, maximally non-peaked.

    Raises:
        ValueError: window length even or below 3 (no unique center).
    """
    a = np.asarray(window_a, dtype=np.float64)
    b = np.asarray(window_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("windows must be equal-length 1-d sequences")
    n = a.size
    if n < 3 or n % 2 == 0:
        raise ValueError(f"window length must be odd and >= 3, got {n}")
    d = np.abs(a - b)
    denom = d.mean()
    if denom == 0.0:
        return 1.0
    return float(d[n // 2] / denom)


def baseline_cv(window_a: np.ndarray, window_b: np.ndarray) -> float:
    """Coefficient of variation of the quieter detector over the window.

    The baseline is the window with the lower mean (mean ties resolved to the
    window with smaller sample variance, which keeps the result symmetric
    under detector exchange). Returns sample sd / mean, or 0 when the mean is
    zero. A noisy baseline under a candidate peak suggests the "peak" is an
    attenuated echo rather than one-sided diffraction.

    Raises:
        ValueError: windows shorter than 2 or of unequal length.
    """
    a = np.asarray(window_a, dtype=np.float64)
    b = np.asarray(window_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size < 2:
        raise ValueError("windows must be equal-length 1-d sequences of length >= 2")
    ma, mb = a.mean(), b.mean()
    sa, sb = a.std(ddof=1), b.std(ddof=1)
    if ma < mb or (ma == mb and sa <= sb):
        mean, sd = ma, sa
    else:
        mean, sd = mb, sb
    if mean == 0.0:
        return 0.0
    return float(sd / mean)


def noise_floor(counts: np.ndarray) -> float:
    """Count level below which a window mean is treated as background only.

    median + 2*sqrt(median): for Poisson counting the median tracks the mean
    and sqrt(median) its standard deviation, so ordinary background channels
    sit under the floor while real responses clear it.
    """
    med = float(np.median(np.asarray(counts)))
    return med + 2.0 * np.sqrt(med)


def roughness(a: np.ndarray, b: np.ndarray) -> RoughnessResult:
    """Whole-spectrum asymmetry: standardized mean difference and attenuation.

    score is the absolute t-statistic of the full 4096-channel difference; a
    uniform one-detector attenuation shifts every channel the same way and
    produces a large score, while matched detectors stay near zero.
    attenuation_factor is the maximum-likelihood constant ratio between the
    weaker and stronger detector, min(total)/max(total), 1.0 when both
    totals are zero. weaker_detector names the smaller total (ties go to B).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("spectra must be equal-length 1-d sequences")
    d = a - b
    n = d.size
    mean = d.mean()
    sd = d.std(ddof=1) if n > 1 else 0.0
    if sd == 0.0:
        score = 0.0 if mean == 0.0 else LARGEST_SCORE
    else:
        score = float(abs(mean) / (sd / np.sqrt(n)))
    total_a = float(a.sum())
    total_b = float(b.sum())
    if total_a == 0.0 and total_b == 0.0:
        factor = 1.0
    else:
        factor = min(total_a, total_b) / max(total_a, total_b)
    weaker = "A" if total_a < total_b else "B"
    return RoughnessResult(score=score, attenuation_factor=factor, weaker_detector=weaker)


def _scan_arrays(
    a: np.ndarray, b: np.ndarray, width: int, floor: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized stride-1 window scan.

    Returns (t_abs, peakedness, baseline_cv, dominant_is_a) arrays, one entry
    per window center in [width//2, n - 1 - width//2]. Windows whose dominant
    detector mean falls below floor carry t_abs = 0.
    """
    af = a.astype(np.float64)
    bf = b.astype(np.float64)
    aw = sliding_window_view(af, width)
    bw = sliding_window_view(bf, width)
    d = aw - bw
    m = d.mean(axis=1)
    if width > 1:
        sd = d.std(axis=1, ddof=1)
    else:
        sd = np.zeros_like(m)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.abs(m) / (sd / np.sqrt(width))
    t = np.where(sd == 0.0, np.where(m == 0.0, 0.0, LARGEST_SCORE), t)

    ma = aw.mean(axis=1)
    mb = bw.mean(axis=1)
    dominant_is_a = ma >= mb
    t = np.where(np.maximum(ma, mb) < floor, 0.0, t)

    absd = np.abs(d)
    pk_den = absd.mean(axis=1)
    pk_num = absd[:, width // 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        pk = np.where(pk_den == 0.0, 1.0, pk_num / pk_den)

    if width > 1:
        sa = aw.std(axis=1, ddof=1)
        sb = bw.std(axis=1, ddof=1)
    else:
        sa = np.zeros_like(ma)
        sb = np.zeros_like(mb)
    use_a = (ma < mb) | ((ma == mb) & (sa <= sb))
    base_mean = np.where(use_a, ma, mb)
    base_sd = np.where(use_a, sa, sb)
    with np.errstate(divide="ignore", invalid="ignore"):
        cv = np.where(base_mean == 0.0, 0.0, base_sd / base_mean)

    return t, pk, cv, dominant_is_a


def scan_spectrum(
    a: np.ndarray,
    b: np.ndarray,
    cal: Calibration,
    noise_floor: float,
    width_kev: float = 0.2,
) -> list[WindowScore]:
    """Score every stride-1 window of a detector pair.

    Windows are never truncated: centers run over [half, 4095 - half] where
    half is (width - 1)/2, giving 4096 - (width - 1) scores. Windows whose
    dominant-detector mean is below noise_floor are suppressed (t_abs = 0)
    as indistinguishable from background.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("spectra must be equal-length 1-d sequences")
    width = window_width_channels(cal, width_kev)
    if width > a.size:
        raise ValueError(f"window width {width} exceeds spectrum length {a.size}")
    t, pk, cv, dom_a = _scan_arrays(a, b, width, noise_floor)
    half = width // 2
    return [
        WindowScore(
            center_channel=half + i,
            t_abs=float(t[i]),
            dominant_detector="A" if dom_a[i] else "B",
            peakedness=float(pk[i]),
            baseline_cv=float(cv[i]),
        )
        for i in range(t.size)
    ]


def extract_candidates(
    scores: list[WindowScore], min_separation: int, floor: float = 0.0
) -> list[WindowScore]:
    """Collapse overlapping window responses into isolated candidates.

    Greedy non-maximum suppression: walk scores in descending t_abs order
    (ties toward the lower center channel), keep a score unless its center
    lies within min_separation channels of an already kept candidate. Scores
    with t_abs of zero, or below floor, are never candidates. Output is in
    descending t_abs order and kept centers are pairwise >= min_separation
    apart.
    """
    if min_separation < 1:
        raise ValueError(f"min_separation must be >= 1, got {min_separation}")
    live = [s for s in scores if s.t_abs > 0.0 and s.t_abs >= floor]
    live.sort(key=lambda s: (-s.t_abs, s.center_channel))
    kept: list[WindowScore] = []
    for s in live:
        if all(abs(s.center_channel - k.center_channel) >= min_separation for k in kept):
            kept.append(s)
    return kept
