"""Dual-detector spectral dataset model and JSON persistence.

An experiment is a set of beam locations on a sample image; each location
carries one spectrum per detector (A and B), 4096 channels of non-negative
event counts, sharing a single linear energy calibration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

N_CHANNELS = 4096


class DatasetError(Exception):
    """Base class for dataset file problems."""


class ParseError(DatasetError):
    """File is not syntactically or structurally readable."""


class ValidationError(DatasetError):
    """File parsed but violates a dataset invariant."""


@dataclass(frozen=True)
class Calibration:
    """Linear channel-to-energy mapping: energy = offset + gain * channel.

    Defaults give a 32 keV full scale over 4096 channels, matching common
    flight-instrument configurations.
    """

    offset_kev: float = 0.0
    gain_kev_per_channel: float = 0.0078125

    def __post_init__(self) -> None:
        if not self.gain_kev_per_channel > 0:
            raise ValueError(f"gain must be positive, got {self.gain_kev_per_channel}")


def energy_of_channel(channel: int, cal: Calibration) -> float:
    """Energy in keV at the center of a channel.

    Raises:
        ValueError: if channel is outside [0, 4095].
    """
    if not 0 <= channel < N_CHANNELS:
        raise ValueError(f"channel {channel} out of range [0, {N_CHANNELS - 1}]")
    return cal.offset_kev + cal.gain_kev_per_channel * channel


def channel_of_energy(energy_kev: float, cal: Calibration) -> int:
    """Nearest channel index for an energy, clamped to [0, 4095]."""
    raw = round((energy_kev - cal.offset_kev) / cal.gain_kev_per_channel)
    return int(min(max(raw, 0), N_CHANNELS - 1))


def window_width_channels(cal: Calibration, width_kev: float = 0.2) -> int:
    """Odd channel count spanning a given energy width.

    Rounds width/gain to the nearest integer, then bumps even results up by
    one so every window has a unique center channel.
    """
    if not width_kev > 0:
        raise ValueError(f"width must be positive, got {width_kev}")
    w = int(round(width_kev / cal.gain_kev_per_channel))
    if w % 2 == 0:
        w += 1
    return max(w, 1)


def _as_counts(values: object, where: str) -> np.ndarray:
    """Coerce a JSON array to a 4096-long non-negative integer count vector."""
    if not isinstance(values, list):
        raise ParseError(f"{where}: expected an array of counts")
    if len(values) != N_CHANNELS:
        raise ValidationError(f"{where}: spectrum has length {len(values)}, expected {N_CHANNELS}")
    arr = np.asarray(values)
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValidationError(f"{where}: counts must be integers")
    if (arr < 0).any():
        raise ValidationError(f"{where}: counts must be non-negative")
    return arr.astype(np.int64)


@dataclass
class BeamLocation:
    """One beam position: image coordinates plus both detector spectra."""

    id: int
    x: float
    y: float
    a: np.ndarray
    b: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BeamLocation):
            return NotImplemented
        return (
            self.id == other.id
            and self.x == other.x
            and self.y == other.y
            and np.array_equal(self.a, other.a)
            and np.array_equal(self.b, other.b)
        )


@dataclass
class Dataset:
    """A named collection of beam locations under one calibration."""

    name: str
    calibration: Calibration = field(default_factory=Calibration)
    locations: list[BeamLocation] = field(default_factory=list)
    image_width: int = 0
    image_height: int = 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.name == other.name
            and self.calibration == other.calibration
            and self.image_width == other.image_width
            and self.image_height == other.image_height
            and self.locations == other.locations
        )

    def validate(self) -> None:
        """Check dataset invariants; raises ValidationError on violation."""
        seen: set[int] = set()
        for loc in self.locations:
            if loc.id in seen:
                raise ValidationError(f"duplicate location id {loc.id}")
            seen.add(loc.id)
            for det, counts in (("a", loc.a), ("b", loc.b)):
                if counts.shape != (N_CHANNELS,):
                    raise ValidationError(
                        f"location {loc.id}: spectrum '{det}' has length "
                        f"{counts.shape[0] if counts.ndim == 1 else counts.shape}, expected {N_CHANNELS}"
                    )
                if (counts < 0).any():
                    raise ValidationError(f"location {loc.id}: spectrum '{det}' has negative counts")
            if not (0 <= loc.x < self.image_width and 0 <= loc.y < self.image_height):
                raise ValidationError(
                    f"location {loc.id}: position ({loc.x}, {loc.y}) outside "
                    f"image {self.image_width}x{self.image_height}"
                )


def bulk_sum(ds: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Channel-wise sum of all A spectra and all B spectra.

    Raises:
        ValueError: if the dataset has no locations.
    """
    if not ds.locations:
        raise ValueError("bulk_sum of an empty dataset")
    a = np.sum([loc.a for loc in ds.locations], axis=0, dtype=np.int64)
    b = np.sum([loc.b for loc in ds.locations], axis=0, dtype=np.int64)
    return a, b


def _require(obj: dict, key: str, where: str) -> object:
    if key not in obj:
        raise ParseError(f"{where}: missing field '{key}'")
    return obj[key]


def load_dataset(path: str) -> Dataset:
    """Read a dataset JSON file.

    Raises:
        ParseError: malformed JSON or missing fields, with location context.
        ValidationError: structurally valid file violating an invariant
            (wrong spectrum length, duplicate ids, bad coordinates).
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    if not isinstance(raw, dict):
        raise ParseError("top level: expected an object")
    name = _require(raw, "name", "top level")
    cal_raw = _require(raw, "calibration", "top level")
    if not isinstance(cal_raw, dict):
        raise ParseError("calibration: expected an object")
    try:
        cal = Calibration(
            offset_kev=float(_require(cal_raw, "offset_kev", "calibration")),
            gain_kev_per_channel=float(_require(cal_raw, "gain_kev_per_channel", "calibration")),
        )
    except ValueError as e:
        raise ValidationError(f"calibration: {e}") from e
    image = _require(raw, "image", "top level")
    if not isinstance(image, dict):
        raise ParseError("image: expected an object")
    width = int(_require(image, "width", "image"))
    height = int(_require(image, "height", "image"))
    locs_raw = _require(raw, "locations", "top level")
    if not isinstance(locs_raw, list):
        raise ParseError("locations: expected an array")
    locations = []
    for i, entry in enumerate(locs_raw):
        where = f"locations[{i}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected an object")
        loc_id = int(_require(entry, "id", where))
        where = f"location {loc_id}"
        locations.append(
            BeamLocation(
                id=loc_id,
                x=float(_require(entry, "x", where)),
                y=float(_require(entry, "y", where)),
                a=_as_counts(_require(entry, "a", where), f"{where}: 'a'"),
                b=_as_counts(_require(entry, "b", where), f"{where}: 'b'"),
            )
        )
    ds = Dataset(
        name=str(name),
        calibration=cal,
        locations=locations,
        image_width=width,
        image_height=height,
    )
    ds.validate()
    return ds


def save_dataset(ds: Dataset, path: str) -> None:
    """Write a dataset to JSON; load_dataset(save_dataset(ds)) == ds."""
    ds.validate()
    obj = {
        "name": ds.name,
        "calibration": {
            "offset_kev": ds.calibration.offset_kev,
            "gain_kev_per_channel": ds.calibration.gain_kev_per_channel,
        },
        "image": {"width": ds.image_width, "height": ds.image_height},
        "locations": [
            {
                "id": loc.id,
                "x": loc.x,
                "y": loc.y,
                "a": [int(v) for v in loc.a],
                "b": [int(v) for v in loc.b],
            }
            for loc in ds.locations
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, separators=(",", ":"))


def energies(cal: Calibration, channels: Iterable[int] | None = None) -> np.ndarray:
    """Vector of channel-center energies for the full axis or given channels."""
    ch = np.arange(N_CHANNELS) if channels is None else np.asarray(list(channels))
    return cal.offset_kev + cal.gain_kev_per_channel * ch
