"""Dual-detector XRF anomaly detection.

Detects Bragg diffraction peaks and surface roughness in paired-detector
X-ray fluorescence spectra, classifies ambiguous responses for human review,
and closes the loop with a labeling journal, threshold tuning, and a local
review service.
"""

from .spectra import (
    Calibration,
    BeamLocation,
    Dataset,
    DatasetError,
    ParseError,
    ValidationError,
    N_CHANNELS,
    bulk_sum,
    channel_of_energy,
    energies,
    energy_of_channel,
    load_dataset,
    save_dataset,
    window_width_channels,
)
from .heuristics import (
    LARGEST_SCORE,
    RoughnessResult,
    WindowScore,
    baseline_cv,
    diffraction_t_statistic,
    extract_candidates,
    noise_floor,
    peakedness,
    roughness,
    scan_spectrum,
)
from .classifier import (
    AnomalyClass,
    DEFAULT_THRESHOLDS,
    DetectedPeak,
    DetectionReport,
    EvaluationResult,
    LocationRoughness,
    PeakStatus,
    Thresholds,
    classify_window,
    detect,
    evaluate,
    load_report,
    report_to_dict,
    save_report,
    tune_threshold,
)
from .ishmap import (
    ConsensusLabel,
    LabelRecord,
    LabelStore,
    SampleResult,
    Verdict,
    consensus_labels,
    now_iso,
    sample_edge_cases,
    sample_high_response,
    tuning_pairs,
)
from .synth import (
    DiffractionInjection,
    FlatOffset,
    FluorescenceLine,
    GroundTruth,
    LocationTruth,
    RoughnessInjection,
    SynthConfig,
    generate,
    load_truth,
    save_truth,
    standard_benchmark,
)
from .service import DEFAULT_PORT, PORT_ENV_VAR, create_app, replay_statuses

__version__ = "0.1.0"
