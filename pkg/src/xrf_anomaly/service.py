"""Local review service: detection results, histograms, maps, label writes.

The service is read-mostly over an immutable detection report plus an
append-only label journal. The single mutation is a peak status change,
which appends a verdict record; every read endpoint is a pure function of
(report, journal) state, so identical state yields byte-identical responses
across restarts.
"""

from __future__ import annotations

import math
from typing import Any

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from .classifier import (
    AnomalyClass,
    DetectedPeak,
    DetectionReport,
    PeakStatus,
    report_to_dict,
)
from .ishmap import LabelRecord, LabelStore, Verdict, now_iso
from .spectra import Dataset, N_CHANNELS, window_width_channels

DEFAULT_PORT = 8410
PORT_ENV_VAR = "XRF_ANOMALY_PORT"

_SORT_KEYS = {
    "t_abs": lambda p: p.t_abs,
    "energy": lambda p: p.energy_kev,
    "location_id": lambda p: p.location_id,
}

_STATUS_VERDICT = {
    PeakStatus.CONFIRMED: Verdict.DIFFRACTION,
    PeakStatus.FALSE_POSITIVE: Verdict.NOT_DIFFRACTION,
}

_VERDICT_STATUS = {
    Verdict.DIFFRACTION: PeakStatus.CONFIRMED,
    Verdict.NOT_DIFFRACTION: PeakStatus.FALSE_POSITIVE,
    Verdict.AMBIGUOUS: PeakStatus.UNREVIEWED,
}


def _peak_dict(p: DetectedPeak) -> dict[str, Any]:
    return {
        "key": p.key,
        "location_id": p.location_id,
        "center_channel": p.center_channel,
        "energy_kev": p.energy_kev,
        "t_abs": p.t_abs,
        "peakedness": p.peakedness,
        "baseline_cv": p.baseline_cv,
        "dominant_detector": p.dominant_detector,
        "class": p.anomaly_class.value,
        "status": p.status.value,
    }


def replay_statuses(report: DetectionReport, store: LabelStore) -> None:
    """Restore peak statuses from the journal, last record per peak winning."""
    last_verdict: dict[tuple[int, int], Verdict] = {}
    for rec in store.records():
        if rec.dataset == report.dataset:
            last_verdict[(rec.location_id, rec.center_channel)] = rec.verdict
    for peak in report.peaks:
        verdict = last_verdict.get((peak.location_id, peak.center_channel))
        if verdict is not None:
            peak.status = _VERDICT_STATUS[verdict]


def create_app(
    dataset: Dataset,
    report: DetectionReport,
    store: LabelStore,
    ui_dir: str | None = None,
) -> FastAPI:
    """Build the service over one dataset, its report, and a label journal.

    Journal replay happens here, so a restarted service resumes exactly the
    state its journal describes. The report object is updated in place as
    verdicts arrive.
    """
    if dataset.name != report.dataset:
        raise ValueError(
            f"report is for dataset {report.dataset!r}, not {dataset.name!r}"
        )
    replay_statuses(report, store)

    app = FastAPI(title="xrf-anomaly review service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    peaks_by_key = {(p.location_id, p.center_channel): p for p in report.peaks}
    locations_by_id = {loc.id: loc for loc in dataset.locations}
    half_window = window_width_channels(dataset.calibration) // 2

    def parse_key(key: str) -> DetectedPeak:
        try:
            loc_part, ch_part = key.split(":")
            peak = peaks_by_key.get((int(loc_part), int(ch_part)))
        except ValueError:
            peak = None
        if peak is None:
            raise HTTPException(status_code=404, detail=f"unknown peak {key!r}")
        return peak

    def parse_class(name: str | None) -> AnomalyClass | None:
        if name is None:
            return None
        try:
            return AnomalyClass(name)
        except ValueError:
            raise HTTPException(status_code=400, detail=f"unknown class {name!r}")

    def live_diffraction(lo: float | None = None, hi: float | None = None) -> list[DetectedPeak]:
        """Diffraction-classified peaks not reviewed away, optionally in range."""
        out = []
        for p in report.peaks:
            if p.anomaly_class is not AnomalyClass.DIFFRACTION:
                continue
            if p.status is PeakStatus.FALSE_POSITIVE:
                continue
            if lo is not None and not lo <= p.energy_kev <= hi:
                continue
            out.append(p)
        return out

    @app.get("/")
    def root() -> dict:
        return {
            "service": "xrf-anomaly",
            "dataset": dataset.name,
            "locations": len(dataset.locations),
            "peaks": len(report.peaks),
            "ui": "/ui/" if ui_dir else None,
        }

    @app.get("/report")
    def get_report() -> dict:
        return report_to_dict(report)

    @app.get("/peaks")
    def list_peaks(
        sort: str = "t_abs",
        order: str = "desc",
        cls: str | None = Query(default=None, alias="class"),
        offset: int = 0,
        limit: int | None = None,
    ) -> dict:
        key_fn = _SORT_KEYS.get(sort)
        if key_fn is None:
            raise HTTPException(status_code=400, detail=f"unknown sort key {sort!r}")
        if order not in ("asc", "desc"):
            raise HTTPException(status_code=400, detail=f"order must be asc or desc, got {order!r}")
        if offset < 0 or (limit is not None and limit < 0):
            raise HTTPException(status_code=400, detail="offset and limit must be non-negative")
        wanted = parse_class(cls)
        rows = [p for p in report.peaks if wanted is None or p.anomaly_class is wanted]
        rows.sort(key=key_fn, reverse=(order == "desc"))
        total = len(rows)
        end = None if limit is None else offset + limit
        return {"total": total, "peaks": [_peak_dict(p) for p in rows[offset:end]]}

    @app.get("/histogram")
    def histogram(
        bin_width_kev: float = 0.1,
        cls: str = Query(default="Diffraction", alias="class"),
    ) -> dict:
        if not bin_width_kev > 0:
            raise HTTPException(status_code=400, detail="bin_width_kev must be positive")
        wanted = parse_class(cls)
        counts: dict[int, int] = {}
        for p in report.peaks:
            if p.anomaly_class is not wanted or p.status is PeakStatus.FALSE_POSITIVE:
                continue
            idx = math.floor(p.energy_kev / bin_width_kev)
            counts[idx] = counts.get(idx, 0) + 1
        bins = [
            {
                "lower_kev": idx * bin_width_kev,
                "upper_kev": (idx + 1) * bin_width_kev,
                "count": counts[idx],
            }
            for idx in sorted(counts)
        ]
        return {"bin_width_kev": bin_width_kev, "bins": bins}

    @app.post("/select")
    async def select_locations(request: Request) -> dict:
        body = await _json_body(request)
        ranges = body.get("ranges")
        if not isinstance(ranges, list):
            raise HTTPException(status_code=400, detail="body must contain a 'ranges' array")
        parsed = []
        for r in ranges:
            if (
                not isinstance(r, (list, tuple))
                or len(r) != 2
                or not all(isinstance(v, (int, float)) for v in r)
                or not r[0] < r[1]
            ):
                raise HTTPException(status_code=400, detail=f"malformed range {r!r}")
            parsed.append((float(r[0]), float(r[1])))
        ids = set()
        for lo, hi in parsed:
            ids.update(p.location_id for p in live_diffraction(lo, hi))
        return {"location_ids": sorted(ids)}

    @app.get("/map")
    def anomaly_map(
        mode: str = "diffraction",
        lo_kev: float | None = None,
        hi_kev: float | None = None,
    ) -> dict:
        if mode not in ("diffraction", "roughness"):
            raise HTTPException(status_code=400, detail=f"unknown map mode {mode!r}")
        if (lo_kev is None) != (hi_kev is None):
            raise HTTPException(status_code=400, detail="lo_kev and hi_kev must be given together")
        if lo_kev is not None and not lo_kev < hi_kev:
            raise HTTPException(status_code=400, detail="lo_kev must be below hi_kev")
        if mode == "diffraction":
            density: dict[int, float] = {loc.id: 0 for loc in dataset.locations}
            for p in live_diffraction(lo_kev, hi_kev):
                density[p.location_id] = density.get(p.location_id, 0) + 1
        else:
            density = {r.location_id: r.score for r in report.roughness}
        cells = [
            {
                "location_id": loc.id,
                "x": loc.x,
                "y": loc.y,
                "density": density.get(loc.id, 0),
            }
            for loc in sorted(dataset.locations, key=lambda l: l.id)
        ]
        return {"mode": mode, "cells": cells}

    @app.get("/spectrum/{location_id}")
    def spectrum(location_id: int, peak: str | None = None) -> dict:
        loc = locations_by_id.get(location_id)
        if loc is None:
            raise HTTPException(status_code=404, detail=f"unknown location {location_id}")
        window = None
        if peak is not None:
            p = parse_key(peak)
            if p.location_id != location_id:
                raise HTTPException(
                    status_code=400,
                    detail=f"peak {peak!r} belongs to location {p.location_id}, not {location_id}",
                )
            window = {
                "center_channel": p.center_channel,
                "lo_channel": max(0, p.center_channel - half_window),
                "hi_channel": min(N_CHANNELS - 1, p.center_channel + half_window),
            }
        return {
            "location_id": loc.id,
            "x": loc.x,
            "y": loc.y,
            "a": [int(v) for v in loc.a],
            "b": [int(v) for v in loc.b],
            "calibration": {
                "offset_kev": dataset.calibration.offset_kev,
                "gain_kev_per_channel": dataset.calibration.gain_kev_per_channel,
            },
            "window": window,
        }

    @app.post("/peaks/{key}/status")
    async def set_status(key: str, request: Request) -> dict:
        peak = parse_key(key)
        body = await _json_body(request)
        status_raw = body.get("status")
        try:
            status = PeakStatus(status_raw)
        except ValueError:
            status = None
        if status not in _STATUS_VERDICT:
            raise HTTPException(
                status_code=400,
                detail="status must be ConfirmedDiffraction or FalsePositive",
            )
        labeler = body.get("labeler", "ui")
        if not isinstance(labeler, str) or not labeler:
            raise HTTPException(status_code=400, detail="labeler must be a non-empty string")
        store.record(
            LabelRecord(
                dataset=report.dataset,
                location_id=peak.location_id,
                center_channel=peak.center_channel,
                verdict=_STATUS_VERDICT[status],
                labeler=labeler,
                timestamp=now_iso(),
            )
        )
        peak.status = status
        return {"peak": _peak_dict(peak)}

    if ui_dir:
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception:
        raise HTTPException(status_code=400, detail="body must be JSON")
    if not isinstance(body, dict):
        raise HTTPException(status_code=400, detail="body must be a JSON object")
    return body
