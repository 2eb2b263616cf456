import numpy as np
import pytest

from xrf_anomaly import (
    Calibration,
    DiffractionInjection,
    FlatOffset,
    FluorescenceLine,
    N_CHANNELS,
    RoughnessInjection,
    SynthConfig,
    generate,
    load_truth,
    save_truth,
    standard_benchmark,
)
from xrf_anomaly.synth import _BENCHMARK_LINES


def window_mean(spectrum, center, half=13):
    return spectrum[center - half : center + half + 1].mean()


class TestGenerate:
    def test_deterministic(self):
        config = SynthConfig(
            seed=7,
            n_locations=4,
            diffraction=[DiffractionInjection(1, 900, 200.0, "B")],
            roughness=[RoughnessInjection(2, 0.8, "A")],
        )
        ds1, truth1 = generate(config)
        ds2, truth2 = generate(config)
        assert ds1 == ds2
        assert truth1 == truth2

    def test_seed_changes_counts(self):
        ds1, _ = generate(SynthConfig(seed=1))
        ds2, _ = generate(SynthConfig(seed=2))
        assert not np.array_equal(ds1.locations[0].a, ds2.locations[0].a)

    def test_zero_background_no_injections_is_silent(self):
        ds, _ = generate(SynthConfig(seed=3, background=0.0))
        assert ds.locations[0].a.sum() == 0
        assert ds.locations[0].b.sum() == 0

    def test_background_mean_recovered(self):
        ds, _ = generate(SynthConfig(seed=4, background=200.0))
        for spec in (ds.locations[0].a, ds.locations[0].b):
            assert spec.mean() == pytest.approx(200.0, rel=0.01)

    def test_total_counts_match_expectation(self):
        n = 50
        ds, _ = generate(SynthConfig(seed=5, n_locations=n, background=100.0))
        total = sum(int(loc.a.sum() + loc.b.sum()) for loc in ds.locations)
        expected = 2 * n * N_CHANNELS * 100.0
        assert abs(total - expected) < 3 * np.sqrt(expected)

    def test_fluorescence_hits_both_detectors(self):
        config = SynthConfig(
            seed=6, background=100.0, fluorescence_lines=[FluorescenceLine(1000, 1000.0)]
        )
        ds, _ = generate(config)
        loc = ds.locations[0]
        assert window_mean(loc.a, 1000) > 400
        assert window_mean(loc.b, 1000) > 400

    def test_diffraction_hits_one_detector(self):
        config = SynthConfig(
            seed=6, background=100.0, diffraction=[DiffractionInjection(0, 1280, 500.0, "A")]
        )
        ds, truth = generate(config)
        loc = ds.locations[0]
        assert window_mean(loc.a, 1280) > 300
        assert window_mean(loc.b, 1280) == pytest.approx(100.0, abs=15.0)
        assert truth.locations[0].diffraction == [(1280, "A")]

    def test_roughness_scales_whole_detector(self):
        config = SynthConfig(
            seed=8, background=1000.0, roughness=[RoughnessInjection(0, 0.8, "B")]
        )
        ds, truth = generate(config)
        loc = ds.locations[0]
        ratio = loc.b.sum() / loc.a.sum()
        assert ratio == pytest.approx(0.8, abs=0.01)
        assert truth.locations[0].roughness == pytest.approx(0.8)

    def test_flat_offset_confined_to_one_window(self):
        config = SynthConfig(
            seed=9, background=400.0, flat_offsets=[FlatOffset(0, 2000, 200.0, "B")]
        )
        ds, _ = generate(config)
        loc = ds.locations[0]
        assert window_mean(loc.b, 2000) == pytest.approx(600.0, abs=30.0)
        assert window_mean(loc.b, 2100) == pytest.approx(400.0, abs=30.0)
        assert window_mean(loc.a, 2000) == pytest.approx(400.0, abs=30.0)

    def test_grid_coordinates_cover_image(self):
        ds, _ = generate(SynthConfig(seed=10, n_locations=5))
        ds.validate()
        assert ds.image_width == 3 and ds.image_height == 2
        assert {(loc.x, loc.y) for loc in ds.locations} == {
            (0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 1.0), (1.0, 1.0)
        }

    def test_default_sigma_tracks_window(self):
        assert SynthConfig().resolved_sigma() == pytest.approx(27 / 2.3548)
        assert SynthConfig(peak_sigma=4.0).resolved_sigma() == 4.0
        cal = Calibration(gain_kev_per_channel=0.01)
        assert SynthConfig(calibration=cal).resolved_sigma() == pytest.approx(21 / 2.3548)


class TestValidation:
    def test_attenuation_bounds(self):
        for bad in (0.0, 1.0, -0.1, 1.5):
            config = SynthConfig(roughness=[RoughnessInjection(0, bad, "A")])
            with pytest.raises(ValueError, match="attenuation"):
                generate(config)

    def test_unknown_location(self):
        config = SynthConfig(diffraction=[DiffractionInjection(5, 100, 10.0, "A")])
        with pytest.raises(ValueError, match="location"):
            generate(config)

    def test_bad_detector(self):
        config = SynthConfig(diffraction=[DiffractionInjection(0, 100, 10.0, "C")])
        with pytest.raises(ValueError, match="detector"):
            generate(config)

    def test_channel_out_of_range(self):
        config = SynthConfig(diffraction=[DiffractionInjection(0, N_CHANNELS, 10.0, "A")])
        with pytest.raises(ValueError, match="channel"):
            generate(config)

    def test_negative_amplitude(self):
        config = SynthConfig(fluorescence_lines=[FluorescenceLine(100, -1.0)])
        with pytest.raises(ValueError, match="amplitude"):
            generate(config)


class TestStandardBenchmark:
    def test_composition(self):
        ds, truth = standard_benchmark(3)
        assert len(ds.locations) == 213
        assert ds.name == "benchmark-3"
        with_peak = [t for t in truth.locations if t.diffraction]
        rough = [t for t in truth.locations if t.roughness is not None]
        assert len(with_peak) == 107
        assert len(rough) == 20
        assert all(len(t.diffraction) == 1 for t in with_peak)
        assert not any(t.roughness is not None and t.diffraction for t in truth.locations)

    def test_deterministic(self):
        ds1, t1 = standard_benchmark(4)
        ds2, t2 = standard_benchmark(4)
        assert ds1 == ds2 and t1 == t2
        ds3, _ = standard_benchmark(5)
        assert not ds1 == ds3

    def test_peak_channels_avoid_lines(self):
        _, truth = standard_benchmark(6)
        line_channels = [line.channel for line in _BENCHMARK_LINES]
        for t in truth.locations:
            for channel, detector in t.diffraction:
                assert 150 <= channel < 3600
                assert detector in ("A", "B")
                assert all(abs(channel - lc) > 60 for lc in line_channels)

    def test_roughness_range(self):
        _, truth = standard_benchmark(7)
        for t in truth.locations:
            if t.roughness is not None:
                assert 0.7 <= t.roughness <= 0.95


class TestTruthPersistence:
    def test_round_trip(self, tmp_path):
        _, truth = standard_benchmark(8)
        path = tmp_path / "truth.json"
        save_truth(truth, str(path))
        assert load_truth(str(path)) == truth
