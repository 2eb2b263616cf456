"""Synthetic dual-detector experiments with known ground truth.

The forward model keeps only what the detection heuristics care about: a flat
mean background, fluorescence lines shared by both detectors, diffraction
peaks on exactly one detector, uniform single-detector attenuation for
surface roughness, and Poisson counting noise. Gaussian peak shape with a
fixed width stands in for the instrument response.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .spectra import (
    BeamLocation,
    Calibration,
    Dataset,
    N_CHANNELS,
    window_width_channels,
)

# FWHM-to-sigma conversion for a Gaussian: FWHM = 2*sqrt(2*ln 2) * sigma.
_FWHM_FACTOR = 2.3548


@dataclass(frozen=True)
class FluorescenceLine:
    """An isotropic emission line, identical in both detectors."""

    channel: int
    amplitude: float


@dataclass(frozen=True)
class DiffractionInjection:
    """A one-detector Gaussian peak at a known channel."""

    location_id: int
    channel: int
    amplitude: float
    detector: str


@dataclass(frozen=True)
class RoughnessInjection:
    """Uniform attenuation of one detector's whole spectrum."""

    location_id: int
    attenuation: float
    detector: str


@dataclass(frozen=True)
class FlatOffset:
    """A constant added to one detector over a single window width.

    Mimics a localized gain artifact: a detector difference with no peak
    shape, the kind of pattern the peakedness heuristic exists to flag.
    """

    location_id: int
    center_channel: int
    offset: float
    detector: str


@dataclass
class SynthConfig:
    """Full description of one synthetic experiment."""

    seed: int = 0
    n_locations: int = 1
    background: float = 100.0
    calibration: Calibration = field(default_factory=Calibration)
    fluorescence_lines: list[FluorescenceLine] = field(default_factory=list)
    diffraction: list[DiffractionInjection] = field(default_factory=list)
    roughness: list[RoughnessInjection] = field(default_factory=list)
    flat_offsets: list[FlatOffset] = field(default_factory=list)
    peak_sigma: float | None = None
    name: str = "synth"

    def resolved_sigma(self) -> float:
        """Peak width in channels; defaults to FWHM equal to the scan window."""
        if self.peak_sigma is not None:
            return self.peak_sigma
        return window_width_channels(self.calibration) / _FWHM_FACTOR

    def validate(self) -> None:
        if self.n_locations < 1:
            raise ValueError("n_locations must be >= 1")
        if self.background < 0:
            raise ValueError("background must be >= 0")
        ids = range(self.n_locations)
        for line in self.fluorescence_lines:
            if not 0 <= line.channel < N_CHANNELS:
                raise ValueError(f"line channel {line.channel} out of range")
            if line.amplitude < 0:
                raise ValueError("line amplitude must be >= 0")
        for inj in self.diffraction:
            if inj.location_id not in ids:
                raise ValueError(f"diffraction location {inj.location_id} unknown")
            if not 0 <= inj.channel < N_CHANNELS:
                raise ValueError(f"diffraction channel {inj.channel} out of range")
            if inj.amplitude < 0:
                raise ValueError("diffraction amplitude must be >= 0")
            if inj.detector not in ("A", "B"):
                raise ValueError(f"detector must be 'A' or 'B', got {inj.detector!r}")
        for r in self.roughness:
            if r.location_id not in ids:
                raise ValueError(f"roughness location {r.location_id} unknown")
            if not 0.0 < r.attenuation < 1.0:
                raise ValueError(f"attenuation must be in (0, 1), got {r.attenuation}")
            if r.detector not in ("A", "B"):
                raise ValueError(f"detector must be 'A' or 'B', got {r.detector!r}")
        for f in self.flat_offsets:
            if f.location_id not in ids:
                raise ValueError(f"flat offset location {f.location_id} unknown")
            if not 0 <= f.center_channel < N_CHANNELS:
                raise ValueError(f"flat offset channel {f.center_channel} out of range")
            if f.offset < 0:
                raise ValueError("flat offset must be >= 0")
            if f.detector not in ("A", "B"):
                raise ValueError(f"detector must be 'A' or 'B', got {f.detector!r}")


@dataclass
class LocationTruth:
    """What was actually injected at one location."""

    id: int
    diffraction: list[tuple[int, str]] = field(default_factory=list)
    roughness: float | None = None


@dataclass
class GroundTruth:
    """Per-location injection record for a generated dataset."""

    locations: list[LocationTruth] = field(default_factory=list)

    def by_id(self) -> dict[int, LocationTruth]:
        return {t.id: t for t in self.locations}


def _gaussian(channels: np.ndarray, center: float, sigma: float) -> np.ndarray:
    return np.exp(-((channels - center) ** 2) / (2.0 * sigma * sigma))


def generate(config: SynthConfig) -> tuple[Dataset, GroundTruth]:
    """Draw one experiment from the forward model.

    Per location, the noiseless intensity is background + fluorescence lines
    (both detectors) + diffraction Gaussians (their detector only) + flat
    offsets (their detector only); a roughness injection then multiplies its
    whole detector intensity by the attenuation factor; observed counts are
    channel-wise Poisson draws. Locations get independent child seeds from
    one root sequence, so generation is reproducible regardless of the order
    locations are drawn in.
    """
    config.validate()
    sigma = config.resolved_sigma()
    channels = np.arange(N_CHANNELS, dtype=np.float64)

    base = np.full(N_CHANNELS, float(config.background))
    for line in config.fluorescence_lines:
        base = base + line.amplitude * _gaussian(channels, line.channel, sigma)

    diff_by_loc: dict[int, list[DiffractionInjection]] = {}
    for inj in config.diffraction:
        diff_by_loc.setdefault(inj.location_id, []).append(inj)
    rough_by_loc = {r.location_id: r for r in config.roughness}
    flat_by_loc: dict[int, list[FlatOffset]] = {}
    for f in config.flat_offsets:
        flat_by_loc.setdefault(f.location_id, []).append(f)

    grid_w = max(1, math.ceil(math.sqrt(config.n_locations)))
    grid_h = max(1, math.ceil(config.n_locations / grid_w))
    half_window = window_width_channels(config.calibration) // 2

    children = np.random.SeedSequence(config.seed).spawn(config.n_locations)
    locations = []
    truths = []
    for i in range(config.n_locations):
        intensity = {"A": base.copy(), "B": base.copy()}
        truth = LocationTruth(id=i)
        for inj in diff_by_loc.get(i, ()):
            intensity[inj.detector] += inj.amplitude * _gaussian(channels, inj.channel, sigma)
            truth.diffraction.append((inj.channel, inj.detector))
        for f in flat_by_loc.get(i, ()):
            lo = max(0, f.center_channel - half_window)
            hi = min(N_CHANNELS, f.center_channel + half_window + 1)
            intensity[f.detector][lo:hi] += f.offset
        r = rough_by_loc.get(i)
        if r is not None:
            intensity[r.detector] *= r.attenuation
            truth.roughness = r.attenuation
        rng = np.random.default_rng(children[i])
        a = rng.poisson(intensity["A"]).astype(np.int64)
        b = rng.poisson(intensity["B"]).astype(np.int64)
        locations.append(BeamLocation(id=i, x=float(i % grid_w), y=float(i // grid_w), a=a, b=b))
        truths.append(truth)

    ds = Dataset(
        name=config.name,
        calibration=config.calibration,
        locations=locations,
        image_width=grid_w,
        image_height=grid_h,
    )
    return ds, GroundTruth(locations=truths)


# Standard benchmark composition. The line set loosely follows common K-alpha
# energies on the default calibration; amplitudes and the negative-class mix
# are fixed so every decision branch sees traffic across seeds.
_BENCHMARK_LINES = [
    FluorescenceLine(472, 600.0),   # ~3.7 keV
    FluorescenceLine(819, 800.0),   # ~6.4 keV
    FluorescenceLine(1100, 300.0),
    FluorescenceLine(1813, 400.0),
    FluorescenceLine(2400, 250.0),
    FluorescenceLine(3100, 200.0),
]
_BENCHMARK_SIZE = 213
_BENCHMARK_POSITIVES = 107
_BENCHMARK_ROUGH = 20
_BENCHMARK_FLAT = 10
_BENCHMARK_BACKGROUND = 100.0
_CHANNEL_RANGE = (150, 3600)
_LINE_MARGIN = 60


def standard_benchmark(seed: int) -> tuple[Dataset, GroundTruth]:
    """Fixed-composition evaluation set: 213 locations, 107 with diffraction.

    Each positive location carries one diffraction peak at amplitude 5x the
    Poisson sigma of the background (5 * sqrt(background)) at a random channel
    away from every fluorescence line. Of the 106 negatives, 20 carry surface
    roughness (attenuation uniform in [0.7, 0.95]), 10 carry a flat one-window
    offset at 0.8 * sqrt(background), and the rest are background plus lines
    only. Fully determined by the seed.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5BEC]))
    order = rng.permutation(_BENCHMARK_SIZE)
    positives = order[:_BENCHMARK_POSITIVES]
    negatives = order[_BENCHMARK_POSITIVES:]
    rough_ids = negatives[:_BENCHMARK_ROUGH]
    flat_ids = negatives[_BENCHMARK_ROUGH : _BENCHMARK_ROUGH + _BENCHMARK_FLAT]

    amp = 5.0 * math.sqrt(_BENCHMARK_BACKGROUND)
    flat_offset = 0.8 * math.sqrt(_BENCHMARK_BACKGROUND)
    line_channels = [line.channel for line in _BENCHMARK_LINES]

    def clear_channel() -> int:
        while True:
            c = int(rng.integers(*_CHANNEL_RANGE))
            if all(abs(c - lc) > _LINE_MARGIN for lc in line_channels):
                return c

    config = SynthConfig(
        seed=seed,
        n_locations=_BENCHMARK_SIZE,
        background=_BENCHMARK_BACKGROUND,
        fluorescence_lines=list(_BENCHMARK_LINES),
        name=f"benchmark-{seed}",
    )
    for i in positives:
        config.diffraction.append(
            DiffractionInjection(
                location_id=int(i),
                channel=clear_channel(),
                amplitude=amp,
                detector="A" if rng.random() < 0.5 else "B",
            )
        )
    for i in rough_ids:
        config.roughness.append(
            RoughnessInjection(
                location_id=int(i),
                attenuation=float(rng.uniform(0.7, 0.95)),
                detector="A" if rng.random() < 0.5 else "B",
            )
        )
    for i in flat_ids:
        config.flat_offsets.append(
            FlatOffset(
                location_id=int(i),
                center_channel=clear_channel(),
                offset=flat_offset,
                detector="A" if rng.random() < 0.5 else "B",
            )
        )
    return generate(config)


def save_truth(truth: GroundTruth, path: str) -> None:
    """Write ground truth as JSON: {locations: [{id, diffraction, roughness}]}."""
    obj = {
        "locations": [
            {
                "id": t.id,
                "diffraction": [{"channel": c, "detector": d} for c, d in t.diffraction],
                "roughness": t.roughness,
            }
            for t in truth.locations
        ]
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, separators=(",", ":"))


def load_truth(path: str) -> GroundTruth:
    """Read a ground-truth JSON file written by save_truth."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    locations = []
    for entry in raw["locations"]:
        locations.append(
            LocationTruth(
                id=int(entry["id"]),
                diffraction=[(int(d["channel"]), str(d["detector"])) for d in entry["diffraction"]],
                roughness=None if entry["roughness"] is None else float(entry["roughness"]),
            )
        )
    return GroundTruth(locations=locations)
