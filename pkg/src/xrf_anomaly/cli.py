"""Command-line pipeline: simulate, detect, evaluate, tune, serve.

Exit codes: 0 success, 1 file or data failure, 2 usage error, 3 evaluation
below a requested accuracy bar.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .classifier import (
    DEFAULT_THRESHOLDS,
    Thresholds,
    detect,
    evaluate,
    load_report,
    save_report,
    tune_threshold,
)
from .ishmap import LabelStore, tuning_pairs
from .service import DEFAULT_PORT, PORT_ENV_VAR, create_app
from .spectra import Calibration, DatasetError, load_dataset, save_dataset
from .synth import (
    DiffractionInjection,
    FlatOffset,
    FluorescenceLine,
    RoughnessInjection,
    SynthConfig,
    generate,
    load_truth,
    save_truth,
    standard_benchmark,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_BELOW_BAR = 3


def _config_from_json(obj: dict) -> SynthConfig:
    """Build a SynthConfig from its JSON form; unknown keys are an error."""
    known = {
        "seed",
        "n_locations",
        "background",
        "calibration",
        "fluorescence_lines",
        "diffraction",
        "roughness",
        "flat_offsets",
        "peak_sigma",
        "name",
    }
    unknown = set(obj) - known
    if unknown:
        raise ValueError(f"unknown config fields: {sorted(unknown)}")
    cal = Calibration(**obj["calibration"]) if "calibration" in obj else Calibration()
    return SynthConfig(
        seed=int(obj.get("seed", 0)),
        n_locations=int(obj.get("n_locations", 1)),
        background=float(obj.get("background", 100.0)),
        calibration=cal,
        fluorescence_lines=[FluorescenceLine(**d) for d in obj.get("fluorescence_lines", [])],
        diffraction=[DiffractionInjection(**d) for d in obj.get("diffraction", [])],
        roughness=[RoughnessInjection(**d) for d in obj.get("roughness", [])],
        flat_offsets=[FlatOffset(**d) for d in obj.get("flat_offsets", [])],
        peak_sigma=obj.get("peak_sigma"),
        name=str(obj.get("name", "synth")),
    )


def _cmd_simulate(args: argparse.Namespace) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError("config must be a JSON object")
    if "standard_benchmark" in obj:
        extra = set(obj) - {"standard_benchmark"}
        if extra:
            raise ValueError(f"standard_benchmark config cannot be combined with {sorted(extra)}")
        seed = int(obj["standard_benchmark"].get("seed", 0))
        ds, truth = standard_benchmark(seed)
    else:
        ds, truth = generate(_config_from_json(obj))
    os.makedirs(args.out, exist_ok=True)
    dataset_path = os.path.join(args.out, "dataset.json")
    truth_path = os.path.join(args.out, "truth.json")
    save_dataset(ds, dataset_path)
    save_truth(truth, truth_path)
    print(f"wrote {dataset_path} ({len(ds.locations)} locations) and {truth_path}")
    return EXIT_OK


def _cmd_detect(args: argparse.Namespace) -> int:
    ds = load_dataset(args.dataset)
    if args.thresholds:
        with open(args.thresholds, "r", encoding="utf-8") as fh:
            th = Thresholds.from_dict(json.load(fh))
    else:
        th = DEFAULT_THRESHOLDS
    report = detect(ds, th)
    save_report(report, args.out)
    summary = report.summary()
    print(f"wrote {args.out}: {len(report.peaks)} candidates " + json.dumps(summary))
    return EXIT_OK


def _cmd_evaluate(args: argparse.Namespace) -> int:
    report = load_report(args.report)
    truth = load_truth(args.truth)
    result = evaluate(report, truth, match_radius=args.match_radius)
    print(json.dumps(result.to_dict(), indent=2))
    if args.min_accuracy is not None and result.accuracy < args.min_accuracy:
        print(
            f"accuracy {result.accuracy:.4f} below required {args.min_accuracy}",
            file=sys.stderr,
        )
        return EXIT_BELOW_BAR
    return EXIT_OK


def _cmd_tune(args: argparse.Namespace) -> int:
    report = load_report(args.report)
    store = LabelStore(args.labels)
    pairs = tuning_pairs(store, report)
    t_min = tune_threshold(pairs, fp_cost=args.fp_cost)
    print(t_min)
    return EXIT_OK


def _cmd_compact(args: argparse.Namespace) -> int:
    store = LabelStore(args.labels)
    dropped = store.compact()
    print(f"dropped {dropped} superseded record(s), {len(store.records())} kept")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    ds = load_dataset(args.dataset)
    report = load_report(args.report)
    known = {(report.dataset, p.location_id, p.center_channel) for p in report.peaks}
    store = LabelStore(args.labels, known_keys=known)
    app = create_app(ds, report, store, ui_dir=args.ui)
    port = args.port
    if port is None:
        port = int(os.environ.get(PORT_ENV_VAR, DEFAULT_PORT))
    uvicorn.run(app, host=args.host, port=port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xrf-anomaly",
        description="Dual-detector XRF anomaly detection pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic dataset with ground truth")
    p.add_argument("--config", required=True, help="synthesis config JSON")
    p.add_argument("--out", required=True, help="output directory for dataset.json and truth.json")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("detect", help="run detection over a dataset")
    p.add_argument("--dataset", required=True, help="dataset JSON path")
    p.add_argument("--thresholds", help="threshold overrides JSON (defaults used when omitted)")
    p.add_argument("--out", required=True, help="report output path")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("evaluate", help="score a report against ground truth")
    p.add_argument("--report", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--min-accuracy", type=float, default=None, help="exit 3 if accuracy is below this")
    p.add_argument("--match-radius", type=int, default=13, help="peak matching tolerance in channels")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("tune", help="tune the detection threshold from review labels")
    p.add_argument("--labels", required=True, help="label journal path")
    p.add_argument("--report", required=True, help="report supplying candidate scores")
    p.add_argument("--fp-cost", type=float, default=5.0, help="cost of a false positive vs a miss")
    p.set_defaults(func=_cmd_tune)

    p = sub.add_parser("compact-labels", help="drop superseded journal records")
    p.add_argument("--labels", required=True)
    p.set_defaults(func=_cmd_compact)

    p = sub.add_parser("serve", help="start the review service")
    p.add_argument("--dataset", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--labels", required=True, help="label journal path (created if absent)")
    p.add_argument("--port", type=int, default=None, help=f"default {PORT_ENV_VAR} or {DEFAULT_PORT}")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui", default=None, help="directory of UI static files to mount at /ui")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
