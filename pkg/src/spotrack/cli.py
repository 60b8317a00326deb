"""Command line interface: identify, track, evaluate, simulate.

Every command is deterministic given its config and seed; outputs carry no
timestamps so re-runs are byte-identical. The dataset root may come from the
SPOTRACK_DATA environment variable instead of the command line.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import mot_io
from .config import Config, dump_config, load_config
from .identify import (
    detection_stats,
    lifespan_birth_stats,
    match_frames,
    pd_vs_visibility,
    pooled_lifespan_stats,
)
from .metrics import cardinality_mismatch, tgospa
from .pmbm import run_sequence
from .simulate import sample_scenario
from .sort import sort_track
from .trajectories import TrajectorySet

DATA_ENV = "SPOTRACK_DATA"


def _sequence_dirs(root: Path, detector: str | None) -> list[Path]:
    dirs = sorted(d for d in root.iterdir()
                  if d.is_dir() and (d / "seqinfo.ini").exists())
    if detector:
        dirs = [d for d in dirs if detector.lower() in d.name.lower()]
    if not dirs:
        raise ValueError(f"no sequences under {root}"
                         + (f" matching detector {detector!r}" if detector else ""))
    return dirs


def _dataset_root(args) -> Path:
    root = args.dataset or os.environ.get(DATA_ENV)
    if not root:
        raise ValueError(f"no dataset directory given and ${DATA_ENV} is not set")
    root = Path(root)
    if not root.is_dir():
        raise ValueError(f"dataset directory {root} does not exist")
    return root


def _write_csv(path: Path, header: list[str], rows: list) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def cmd_identify(args) -> int:
    root = _dataset_root(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seq_dirs = _sequence_dirs(root, args.detector)

    per_seq = []
    for seq_dir in seq_dirs:
        info, gt, dets = mot_io.load_sequence(seq_dir)
        if gt is None or dets is None:
            raise ValueError(f"{seq_dir.name}: needs both gt/gt.txt and det/det.txt")
        gamma = min(info.image_width, info.image_height)
        matches = match_frames(gt, dets, gamma)
        visibility = mot_io.ground_truth_visibility(seq_dir / "gt" / "gt.txt")
        per_seq.append((info, gt, matches, visibility))

    det_rows = []
    for info, gt, matches, _ in per_seq:
        stats = detection_stats(matches)
        det_rows.append([info.name, _fmt(stats.p_detect), _fmt(stats.clutter_rate)]
                        + [_fmt(v) for v in np.diag(stats.noise_scaled)])
    pooled = detection_stats([m for _, _, m, _ in per_seq])
    det_rows.append(["entire", _fmt(pooled.p_detect), _fmt(pooled.clutter_rate)]
                    + [_fmt(v) for v in np.diag(pooled.noise_scaled)])
    _write_csv(out / "detection_stats.csv",
               ["sequence", "p_detect", "clutter_rate",
                "r_xx", "r_yy", "r_ww", "r_hh"], det_rows)

    vis_rows = []
    for info, gt, matches, visibility in per_seq:
        for lo, hi, rate, count in pd_vs_visibility(matches, visibility, args.bins):
            vis_rows.append([info.name, _fmt(lo), _fmt(hi), _fmt(rate), count])
    _write_csv(out / "pd_visibility.csv",
               ["sequence", "v_low", "v_high", "p_detect", "n_boxes"], vis_rows)

    life_rows = []
    for info, gt, _, _ in per_seq:
        st = lifespan_birth_stats(gt, info.frame_rate)
        life_rows.append([info.name, _fmt(st.mean_count), _fmt(st.var_count),
                          _fmt(st.mean_lifespan), _fmt(st.birth_rate),
                          _fmt(st.predicted_count)])
    entire = pooled_lifespan_stats([(gt, info.frame_rate) for info, gt, _, _ in per_seq])
    life_rows.append(["entire", _fmt(entire.mean_count), _fmt(entire.var_count),
                      _fmt(entire.mean_lifespan), _fmt(entire.birth_rate),
                      _fmt(entire.predicted_count)])
    _write_csv(out / "lifespan_stats.csv",
               ["sequence", "mean_n", "var_n", "mean_lifespan_s",
                "birth_rate_per_s", "predicted_n"], life_rows)
    print(f"identify: wrote 3 reports for {len(per_seq)} sequences to {out}")
    return 0


def _track_one(seq_dir: str, out_dir: str, engine: str,
               config_path: str | None, overrides: dict) -> str:
    config = load_config(config_path, overrides)
    seq_dir = Path(seq_dir)
    info, _, dets = mot_io.load_sequence(seq_dir)
    if dets is None:
        raise ValueError(f"{seq_dir.name}: no det/det.txt")
    start = time.perf_counter()
    if engine == "pmbm":
        model = config.model_for(info.image_width, info.image_height, info.frame_rate)
        tracks = run_sequence(dets, model, config.filter)
    else:
        tracks = sort_track(dets, config.sort)
    elapsed = time.perf_counter() - start
    out_path = Path(out_dir) / f"{info.name}.txt"
    mot_io.write_tracks(out_path, tracks)
    return f"{info.name}: {len(tracks)} tracks, {elapsed:.1f}s"


def cmd_track(args) -> int:
    if args.engine not in ("pmbm", "sort"):
        raise ValueError(f"unknown engine {args.engine!r}; expected pmbm or sort")
    root = _dataset_root(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seq_dirs = _sequence_dirs(root, args.detector)
    overrides = _override_dict(args.set)
    jobs = [(str(d), str(out), args.engine, args.config, overrides) for d in seq_dirs]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for line in pool.map(_track_one, *zip(*jobs)):
                print(line)
    else:
        for job in jobs:
            print(_track_one(*job))
    print(f"track[{args.engine}]: results in {out}")
    return 0


def cmd_evaluate(args) -> int:
    config = load_config(args.config, _override_dict(args.set))
    gt_root = _dataset_root(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    engines = []
    for spec_arg in args.results:
        name, _, directory = spec_arg.partition("=")
        if not directory:
            name, directory = Path(spec_arg).name, spec_arg
        engines.append((name, Path(directory)))
    seq_dirs = _sequence_dirs(gt_root, args.detector)

    header = ["engine", "sequence", "tgospa", "localization", "matched",
              "missed", "false", "switches", "switch_cost", "cardinality_mismatch"]
    rows = []
    chart: dict[str, dict[str, float]] = {}
    for name, directory in engines:
        for seq_dir in seq_dirs:
            info, gt, _ = mot_io.load_sequence(seq_dir)
            if gt is None:
                raise ValueError(f"{seq_dir.name}: no ground truth to evaluate against")
            result_path = directory / f"{info.name}.txt"
            if not result_path.exists():
                raise ValueError(f"engine {name!r} is missing results for {info.name} "
                                 f"(expected {result_path})")
            tracks = _read_result(result_path, (1, info.seq_length))
            report = tgospa(tracks, gt, config.metrics)
            mismatch = cardinality_mismatch(tracks, gt)
            rows.append([name, info.name, _fmt(report.value), _fmt(report.localization),
                         _fmt(report.n_matched), _fmt(report.n_missed),
                         _fmt(report.n_false), _fmt(report.n_switches),
                         _fmt(report.switch_cost), mismatch])
            chart.setdefault(info.name, {})[name] = report.value
    _write_csv(out / "evaluation.csv", header, rows)
    _bar_chart(out / "evaluation.svg", chart, "trajectory metric")
    print(f"evaluate: {len(rows)} rows to {out / 'evaluation.csv'}")
    return 0


def _read_result(path: Path, frame_range) -> TrajectorySet:
    from .trajectories import trajectory_set_from_rows
    rows = mot_io._parse_rows(path, 6)
    if not rows:
        return TrajectorySet({}, frame_range)
    arr = np.array(rows)
    boxes = mot_io.to_bottom_center(arr[:, 2:6])
    return trajectory_set_from_rows(arr[:, 0].astype(int), arr[:, 1].astype(int),
                                    boxes, frame_range)


def _bar_chart(path: Path, chart: dict[str, dict[str, float]], ylabel: str) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    plt.rcParams["svg.hashsalt"] = "spotrack"
    sequences = sorted(chart)
    engines = sorted({e for per in chart.values() for e in per})
    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(sequences)), 4.0))
    width = 0.8 / max(len(engines), 1)
    xs = np.arange(len(sequences))
    for i, engine in enumerate(engines):
        vals = [chart[s].get(engine, 0.0) for s in sequences]
        ax.bar(xs + i * width, vals, width, label=engine)
    ax.set_xticks(xs + width * (len(engines) - 1) / 2)
    ax.set_xticklabels(sequences, rotation=30, ha="right")
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def cmd_simulate(args) -> int:
    overrides = _override_dict(args.set)
    if args.frames is not None:
        overrides["simulate.frames"] = str(args.frames)
    if args.seed is not None:
        overrides["simulate.seed"] = str(args.seed)
    config = load_config(args.config, overrides)
    n_frames = config.simulate.frames
    if n_frames < 1:
        raise ValueError("simulate needs at least 1 frame")
    seed = config.simulate.seed
    cam = config.camera
    model = config.model_for(cam.image_width, cam.image_height, cam.frame_rate)
    scenario = sample_scenario(model, n_frames, seed)

    name = f"synth-{seed:04d}"
    seq_dir = Path(args.out) / name
    (seq_dir / "gt").mkdir(parents=True, exist_ok=True)
    (seq_dir / "det").mkdir(parents=True, exist_ok=True)
    with open(seq_dir / "seqinfo.ini", "w") as fh:
        fh.write("[Sequence]\n"
                 f"name={name}\n"
                 f"frameRate={cam.frame_rate:g}\n"
                 f"seqLength={n_frames}\n"
                 f"imWidth={cam.image_width:g}\n"
                 f"imHeight={cam.image_height:g}\n")
    with open(seq_dir / "gt" / "gt.txt", "w") as fh:
        rows = []
        for ident, tr in scenario.gt.tracks.items():
            for frame, box in tr.boxes.items():
                tl = mot_io.to_top_left(box)
                rows.append((frame, ident, tl[0], tl[1], tl[2], tl[3]))
        rows.sort(key=lambda r: (r[0], r[1]))
        for frame, ident, left, top, w, h in rows:
            fh.write(f"{frame},{ident},{left:.2f},{top:.2f},{w:.2f},{h:.2f},1,1,1.0\n")
    with open(seq_dir / "det" / "det.txt", "w") as fh:
        for k, dets in enumerate(scenario.detections, start=1):
            for box in dets:
                tl = mot_io.to_top_left(box)
                fh.write(f"{k},-1,{tl[0]:.2f},{tl[1]:.2f},{tl[2]:.2f},{tl[3]:.2f},1,-1,-1,-1\n")
    with open(seq_dir / "params.ini", "w") as fh:
        fh.write(dump_config(config))
    print(f"simulate: seed {seed}, {n_frames} frames, "
          f"{len(scenario.gt)} objects -> {seq_dir}")
    return 0


def _override_dict(pairs: list[str] | None) -> dict:
    out = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ValueError(f"--set expects section.key=value, got {pair!r}")
        out[key.strip()] = value.strip()
    return out


def _add_common(sub, dataset: bool = True) -> None:
    sub.add_argument("--config", default=None, help="INI config file")
    sub.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                     help="override a config value")
    sub.add_argument("--print-config", action="store_true",
                     help="print the effective configuration and exit")
    if dataset:
        sub.add_argument("--dataset", default=None,
                         help=f"dataset root (default: ${DATA_ENV})")
        sub.add_argument("--detector", default=None,
                         help="only sequences whose name contains this")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spotrack",
        description="Monocular pedestrian tracking toolkit: parameter "
                    "identification, PMBM and SORT tracking, trajectory-metric "
                    "evaluation, and model simulation.")
    subs = parser.add_subparsers(dest="command", required=True)

    p_id = subs.add_parser("identify", help="estimate model parameters from a dataset")
    _add_common(p_id)
    p_id.add_argument("--out", default="identify-out", help="report directory")
    p_id.add_argument("--bins", type=int, default=10, help="visibility bins")
    p_id.set_defaults(func=cmd_identify)

    p_tr = subs.add_parser("track", help="run a tracker over a dataset")
    _add_common(p_tr)
    p_tr.add_argument("--engine", default="pmbm", help="pmbm or sort")
    p_tr.add_argument("--out", default="track-out", help="result directory")
    p_tr.add_argument("--jobs", type=int, default=1, help="parallel sequences")
    p_tr.set_defaults(func=cmd_track)

    p_ev = subs.add_parser("evaluate", help="score result files against ground truth")
    _add_common(p_ev)
    p_ev.add_argument("--results", action="append", required=True,
                      metavar="NAME=DIR", help="engine name and its result directory")
    p_ev.add_argument("--out", default="evaluate-out", help="report directory")
    p_ev.set_defaults(func=cmd_evaluate)

    p_sim = subs.add_parser("simulate", help="sample a synthetic dataset")
    _add_common(p_sim, dataset=False)
    p_sim.add_argument("--seed", type=int, default=None, help="RNG seed")
    p_sim.add_argument("--frames", type=int, default=None, help="sequence length")
    p_sim.add_argument("--out", default="simulate-out", help="dataset directory")
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "print_config", False):
            config = load_config(args.config, _override_dict(args.set))
            print(dump_config(config), end="")
            return 0
        return args.func(args)
    except Exception as err:  # noqa: BLE001 - single reporting point
        print(f"spotrack {args.command}: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
