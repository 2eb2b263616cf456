import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xrf_anomaly import (
    AnomalyClass,
    DetectedPeak,
    DetectionReport,
    DiffractionInjection,
    GroundTruth,
    LocationTruth,
    ParseError,
    PeakStatus,
    RoughnessInjection,
    RoughnessResult,
    SynthConfig,
    Thresholds,
    ValidationError,
    WindowScore,
    classify_window,
    detect,
    evaluate,
    generate,
    load_report,
    report_to_dict,
    save_report,
    tune_threshold,
)

SMOOTH = RoughnessResult(score=0.5, attenuation_factor=0.99, weaker_detector="B")


def window(t, pk=2.0, cv=0.1):
    return WindowScore(center_channel=500, t_abs=t, dominant_detector="A", peakedness=pk, baseline_cv=cv)


class TestClassifyWindow:
    def test_roughness_gate_first(self):
        rough = RoughnessResult(score=10.0, attenuation_factor=0.7, weaker_detector="B")
        got = classify_window(window(t=50.0), rough, Thresholds())
        assert got is AnomalyClass.ROUGHNESS

    def test_low_t_is_normal(self):
        assert classify_window(window(t=3.0), SMOOTH, Thresholds()) is AnomalyClass.NORMAL

    def test_flat_shape_is_ambiguous(self):
        got = classify_window(window(t=9.0, pk=0.2), SMOOTH, Thresholds())
        assert got is AnomalyClass.AMBIGUOUS_FLAT

    def test_structured_baseline_is_ambiguous(self):
        got = classify_window(window(t=9.0, cv=0.5), SMOOTH, Thresholds())
        assert got is AnomalyClass.AMBIGUOUS_ATTENUATED

    def test_clean_peak_is_diffraction(self):
        assert classify_window(window(t=9.0), SMOOTH, Thresholds()) is AnomalyClass.DIFFRACTION

    def test_boundary_values_do_not_trip_gates(self):
        th = Thresholds()
        score = window(t=th.t_min, pk=th.peakedness_min, cv=th.baseline_cv_max)
        rough = RoughnessResult(score=th.roughness_max, attenuation_factor=0.9, weaker_detector="A")
        assert classify_window(score, rough, th) is AnomalyClass.DIFFRACTION


class TestThresholds:
    def test_defaults_valid(self):
        th = Thresholds()
        assert th.t_min == 7.0 and th.candidate_floor == 2.0

    def test_nonpositive_rejected(self):
        for kwargs in ({"t_min": 0.0}, {"roughness_max": -1.0}, {"peakedness_min": 0.0},
                       {"baseline_cv_max": 0.0}, {"candidate_floor": 0.0}):
            with pytest.raises(ValueError):
                Thresholds(**kwargs)

    def test_floor_must_not_exceed_t_min(self):
        with pytest.raises(ValueError, match="candidate_floor"):
            Thresholds(t_min=3.0, candidate_floor=4.0)

    def test_dict_round_trip(self):
        th = Thresholds(t_min=6.5, candidate_floor=1.5)
        assert Thresholds.from_dict(th.to_dict()) == th


class TestDetect:
    def test_identical_detectors_yield_nothing(self):
        ds, _ = generate(SynthConfig(seed=1, n_locations=3, background=150.0))
        for loc in ds.locations:
            loc.b = loc.a.copy()
        report = detect(ds)
        assert report.peaks == []
        assert all(r.score == 0.0 for r in report.roughness)

    def test_quiet_background_yields_almost_nothing(self):
        from xrf_anomaly.synth import _BENCHMARK_LINES

        config = SynthConfig(
            seed=42, n_locations=50, background=100.0,
            fluorescence_lines=list(_BENCHMARK_LINES),
        )
        ds, _ = generate(config)
        report = detect(ds)
        false_hits = [p for p in report.peaks if p.anomaly_class is AnomalyClass.DIFFRACTION]
        assert len(false_hits) <= 1

    def test_strong_peaks_localized(self):
        # 12x the background Poisson sigma: strong enough to pin the channel,
        # small enough that one peak does not tip the whole-spectrum roughness
        # gate (mean |a-b| grows linearly with amplitude, its spread slower)
        amp = 12.0 * np.sqrt(100.0)
        channels = np.linspace(200, 3700, 20).astype(int)
        config = SynthConfig(
            seed=17, n_locations=20, background=100.0, peak_sigma=8.0,
            diffraction=[
                DiffractionInjection(int(i), int(c), amp, "A" if i % 2 else "B")
                for i, c in enumerate(channels)
            ],
        )
        ds, truth = generate(config)
        report = detect(ds)
        hits = 0
        for t in truth.locations:
            injected = t.diffraction[0][0]
            near = [
                p for p in report.peaks
                if p.location_id == t.id
                and p.anomaly_class is AnomalyClass.DIFFRACTION
                and abs(p.center_channel - injected) <= 2
            ]
            hits += bool(near)
        assert hits >= 18

    def test_rough_location_routes_everything_to_roughness(self):
        config = SynthConfig(
            seed=5, n_locations=1, background=200.0,
            diffraction=[DiffractionInjection(0, 1500, 400.0, "A")],
            roughness=[RoughnessInjection(0, 0.7, "B")],
        )
        ds, _ = generate(config)
        report = detect(ds)
        assert report.peaks, "attenuation plus a peak must produce candidates"
        assert all(p.anomaly_class is AnomalyClass.ROUGHNESS for p in report.peaks)
        assert report.roughness[0].score > Thresholds().roughness_max
        assert report.roughness[0].attenuation_factor == pytest.approx(0.7, abs=0.02)

    def test_output_order_normalized(self):
        ds, _ = generate(SynthConfig(seed=11, n_locations=6, background=100.0, diffraction=[
            DiffractionInjection(4, 800, 300.0, "A"),
            DiffractionInjection(4, 2400, 300.0, "B"),
            DiffractionInjection(1, 1300, 300.0, "A"),
        ]))
        report = detect(ds)
        keys = [(p.location_id, p.center_channel) for p in report.peaks]
        assert keys == sorted(keys)
        assert [r.location_id for r in report.roughness] == list(range(6))

    def test_diffraction_count_monotone_in_t_min(self):
        ds, _ = generate(SynthConfig(seed=13, n_locations=8, background=100.0, diffraction=[
            DiffractionInjection(i, 400 + 400 * i, 60.0, "A") for i in range(8)
        ]))
        counts = []
        for t_min in (4.0, 7.0, 12.0, 30.0):
            report = detect(ds, Thresholds(t_min=t_min))
            counts.append(sum(p.anomaly_class is AnomalyClass.DIFFRACTION for p in report.peaks))
        assert counts == sorted(counts, reverse=True)


def make_report(peaks):
    return DetectionReport(dataset="synth", thresholds=Thresholds(), roughness=[], peaks=peaks)


def peak(loc, ch, cls=AnomalyClass.DIFFRACTION, t=9.0):
    return DetectedPeak(
        location_id=loc, center_channel=ch, energy_kev=ch * 0.0078125, t_abs=t,
        peakedness=2.0, baseline_cv=0.1, dominant_detector="A", anomaly_class=cls,
    )


class TestEvaluate:
    def test_worked_confusion(self):
        truth = GroundTruth(locations=[
            LocationTruth(id=0, diffraction=[(1000, "A")]),
            LocationTruth(id=1),
            LocationTruth(id=2, diffraction=[(2000, "B")]),
            LocationTruth(id=3),
        ])
        report = make_report([peak(0, 1002), peak(3, 500)])
        res = evaluate(report, truth)
        assert res.confusion == {"tp": 1, "fp": 1, "fn": 1, "tn": 1}
        assert res.accuracy == 0.5
        assert res.precision == 0.5
        assert res.recall == 0.5
        assert res.offsets == [2]
        assert res.peak_precision == 0.5
        assert res.peak_recall == 0.5

    def test_no_injections_half_flagged(self):
        truth = GroundTruth(locations=[LocationTruth(id=0), LocationTruth(id=1)])
        report = make_report([peak(0, 700)])
        res = evaluate(report, truth)
        assert res.accuracy == 0.5
        assert res.precision == 0.0
        assert res.recall == 1.0

    def test_empty_report_on_empty_truth(self):
        truth = GroundTruth(locations=[LocationTruth(id=0)])
        res = evaluate(make_report([]), truth)
        assert res.accuracy == 1.0 and res.peak_recall == 1.0

    def test_match_radius_respected(self):
        truth = GroundTruth(locations=[LocationTruth(id=0, diffraction=[(1000, "A")])])
        inside = evaluate(make_report([peak(0, 1013)]), truth)
        outside = evaluate(make_report([peak(0, 1014)]), truth)
        assert inside.peak_recall == 1.0 and inside.offsets == [13]
        assert outside.peak_recall == 0.0 and outside.peak_precision == 0.0

    def test_double_detection_counts_once_for_recall(self):
        truth = GroundTruth(locations=[LocationTruth(id=0, diffraction=[(1000, "A")])])
        res = evaluate(make_report([peak(0, 995), peak(0, 1005)]), truth)
        assert res.peak_recall == 1.0
        assert res.peak_precision == 1.0
        assert sorted(res.offsets) == [5, 5]

    def test_non_diffraction_classes_ignored(self):
        truth = GroundTruth(locations=[LocationTruth(id=0)])
        report = make_report([peak(0, 900, cls=AnomalyClass.AMBIGUOUS_FLAT)])
        res = evaluate(report, truth)
        assert res.confusion["fp"] == 0
        assert res.accuracy == 1.0

    def test_uncovered_location_rejected(self):
        truth = GroundTruth(locations=[LocationTruth(id=0)])
        with pytest.raises(ValueError, match="truth does not cover"):
            evaluate(make_report([peak(5, 900)]), truth)


labeled_sets = st.lists(
    st.tuples(st.floats(0.0, 100.0, allow_nan=False), st.booleans()),
    min_size=2, max_size=40,
).filter(lambda xs: any(v for _, v in xs) and any(not v for _, v in xs))


def brute_force_cost(labeled, cut, fp_cost):
    fp = sum(1 for s, v in labeled if not v and s >= cut)
    fn = sum(1 for s, v in labeled if v and s < cut)
    return fp_cost * fp + fn


class TestTuneThreshold:
    def test_worked_example(self):
        labeled = [(1.0, False), (2.0, False), (3.0, False), (8.0, True), (9.0, True)]
        assert tune_threshold(labeled, fp_cost=1.0) == 5.5

    def test_tie_resolves_high(self):
        assert tune_threshold([(1.0, True), (2.0, False)], fp_cost=1.0) == 3.0

    def test_needs_both_classes(self):
        with pytest.raises(ValueError):
            tune_threshold([(1.0, True), (2.0, True)], fp_cost=1.0)
        with pytest.raises(ValueError):
            tune_threshold([(1.0, False)], fp_cost=1.0)

    def test_fp_cost_domain(self):
        with pytest.raises(ValueError):
            tune_threshold([(1.0, False), (2.0, True)], fp_cost=0.5)

    @settings(max_examples=200, deadline=None)
    @given(labeled_sets, st.floats(1.0, 20.0, allow_nan=False))
    def test_matches_exhaustive_search(self, labeled, fp_cost):
        cut = tune_threshold(labeled, fp_cost)
        got = brute_force_cost(labeled, cut, fp_cost)
        scores = sorted({s for s, _ in labeled})
        probes = scores + [s + 1e-6 for s in scores] + [scores[0] - 1.0, scores[-1] + 1.0]
        assert got <= min(brute_force_cost(labeled, p, fp_cost) for p in probes)

    @settings(max_examples=100, deadline=None)
    @given(labeled_sets)
    def test_monotone_in_fp_cost(self, labeled):
        cuts = [tune_threshold(labeled, c) for c in (1.0, 2.0, 5.0, 10.0, 100.0)]
        assert cuts == sorted(cuts)


class TestReportPersistence:
    def make(self):
        ds, _ = generate(SynthConfig(seed=21, n_locations=3, background=100.0, diffraction=[
            DiffractionInjection(1, 1100, 300.0, "B"),
        ]))
        return detect(ds)

    def test_round_trip(self, tmp_path):
        report = self.make()
        path = tmp_path / "report.json"
        save_report(report, str(path))
        loaded = load_report(str(path))
        assert report_to_dict(loaded) == report_to_dict(report)
        assert loaded.thresholds == report.thresholds

    def test_status_survives_round_trip(self, tmp_path):
        report = self.make()
        assert report.peaks, "expected at least one candidate"
        report.peaks[0].status = PeakStatus.CONFIRMED
        path = tmp_path / "report.json"
        save_report(report, str(path))
        assert load_report(str(path)).peaks[0].status is PeakStatus.CONFIRMED

    def test_summary_mismatch_rejected(self, tmp_path):
        report = self.make()
        path = tmp_path / "report.json"
        save_report(report, str(path))
        raw = json.loads(path.read_text())
        raw["summary"]["diffraction"] += 1
        path.write_text(json.dumps(raw))
        with pytest.raises(ValidationError, match="summary"):
            load_report(str(path))

    def test_malformed_json_rejected(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text("{nope")
        with pytest.raises(ParseError, match="line"):
            load_report(str(path))

    def test_missing_field_rejected(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text(json.dumps({"dataset": "x", "thresholds": Thresholds().to_dict()}))
        with pytest.raises(ParseError, match="missing"):
            load_report(str(path))

    def test_summary_counts_every_class(self):
        report = make_report([
            peak(0, 100), peak(0, 200, cls=AnomalyClass.ROUGHNESS),
            peak(0, 300, cls=AnomalyClass.AMBIGUOUS_FLAT),
            peak(0, 400, cls=AnomalyClass.AMBIGUOUS_ATTENUATED),
            peak(0, 500, cls=AnomalyClass.NORMAL), peak(1, 100),
        ])
        assert report.summary() == {
            "diffraction": 2, "roughness": 1, "ambiguous_flat": 1,
            "ambiguous_attenuated": 1, "normal": 1,
        }
