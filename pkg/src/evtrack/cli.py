"""Command-line entry point: ``evtrack {synth,frames,calibrate,track,eval}``.

Data goes only to the paths given on the command line; diagnostics go to
stderr. Outputs are written to a temporary name and renamed into place on
success, so a failing command never leaves partial files behind.

Exit codes: 0 success, 2 usage error, 3 data error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import os
import shutil
import sys
import tempfile
from pathlib import Path
from typing import Dict, Optional, Sequence

import numpy as np

from . import evaluation, stream_io, synth, tracker
from .frames import DEFAULT_EVENTS_PER_FRAME, CountBased, TimeBased, iter_frames
from .roi import DEFAULT_RUN_LENGTH, extract_roi
from .trajectory import read_trajectory, write_trajectory

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read(path) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from None


def _commit(outputs: Dict[str, bytes]) -> None:
    """Write every output to a temp file first, then rename all of them."""
    staged = []
    try:
        for dest, payload in outputs.items():
            d = os.path.dirname(os.path.abspath(dest))
            fd, tmp = tempfile.mkstemp(prefix=".evtrack-", dir=d)
            staged.append((tmp, dest))
            with os.fdopen(fd, "wb") as fh:
                fh.write(payload)
        for tmp, dest in staged:
            os.replace(tmp, dest)
    except OSError as exc:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise CliError(f"cannot write output: {exc}", EXIT_IO) from None


def _framing(args):
    if args.dt is not None:
        return TimeBased(args.dt)
    return CountBased(args.events_per_frame)


def _load_events(path):
    try:
        return stream_io.load_events(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from None


# ---------------------------------------------------------------- commands

def cmd_synth(args) -> int:
    spec = synth.read_scene(_read(args.spec))
    stream, truth = synth.generate(spec)
    _commit({
        args.out_events: stream_io.encode_events(stream, args.binary),
        args.out_truth: write_trajectory(truth),
    })
    print(f"{len(stream)} events, {len(truth)} truth points", file=sys.stderr)
    return EXIT_OK


def to_pgm(counts: np.ndarray) -> bytes:
    """8-bit binary grey map, counts rescaled linearly so the peak maps to 255."""
    peak = int(counts.max()) if counts.size else 0
    if peak > 0:
        grey = (counts.astype(np.float64) * (255.0 / peak) + 0.5).astype(np.uint8)
    else:
        grey = np.zeros(counts.shape, dtype=np.uint8)
    h, w = counts.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + grey.tobytes()


def cmd_frames(args) -> int:
    stream = _load_events(args.events)
    out_dir = Path(args.out_dir)
    if out_dir.exists():
        raise CliError(f"output directory {out_dir} already exists", EXIT_IO)
    parent = out_dir.parent if str(out_dir.parent) else Path(".")
    try:
        tmp = Path(tempfile.mkdtemp(prefix=".evtrack-frames-", dir=parent))
    except OSError as exc:
        raise CliError(f"cannot create output directory: {exc}", EXIT_IO) from None
    try:
        index = ["# frame first_t last_t n_events x_min x_max y_min y_max\n"]
        n = 0
        for k, image in enumerate(iter_frames(stream, _framing(args))):
            (tmp / f"frame_{k:06d}.pgm").write_bytes(to_pgm(image.counts))
            roi = extract_roi(image, args.run_length)
            bounds = "- - - -" if roi is None else f"{roi.x_min} {roi.x_max} {roi.y_min} {roi.y_max}"
            index.append(f"{k} {image.first_t} {image.last_t} {image.n_events} {bounds}\n")
            n += 1
        (tmp / "rois.txt").write_text("".join(index))
        os.replace(tmp, out_dir)
    except OSError as exc:
        shutil.rmtree(tmp, ignore_errors=True)
        raise CliError(f"cannot write frames: {exc}", EXIT_IO) from None
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    print(f"{n} frames", file=sys.stderr)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    model = tracker.read_calibration(_read(args.records))
    _commit({args.out_calib: tracker.write_calibration(model)})
    print(f"focal_px {model.focal_px:.6g}", file=sys.stderr)
    return EXIT_OK


def cmd_track(args) -> int:
    calib_bytes = _read(args.calibration)
    stream = _load_events(args.events)
    calib = tracker.read_calibration(calib_bytes, stream.geometry)
    config = tracker.TrackerConfig(args.smooth_window, args.min_active_fraction)
    traj, stats = tracker.track_with_stats(stream, _framing(args), args.run_length, calib, config)
    _commit({args.out_traj: write_trajectory(traj)})
    print(f"{stats.frames} frames", file=sys.stderr)
    print(f"{stats.skipped} skipped", file=sys.stderr)
    print(f"mean ROI reduction {stats.mean_reduction:.4f}", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    a = read_trajectory(_read(args.traj_a))
    b = read_trajectory(_read(args.traj_b))
    xy, xyz = evaluation.report(a, b)
    text = evaluation.format_report(xy, xyz)
    if args.out_report:
        _commit({args.out_report: text})
    else:
        sys.stdout.write(text.decode())
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _fraction(s: str) -> float:
    v = float(s)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {v}")
    return v


def _add_framing(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("-n", "--events-per-frame", type=_positive_int, default=DEFAULT_EVENTS_PER_FRAME,
                   help="events integrated per frame (default %(default)s)")
    g.add_argument("--dt", type=_positive_int, default=None,
                   help="integrate fixed time windows of DT microseconds instead")
    p.add_argument("-c", "--run-length", type=_positive_int, default=DEFAULT_RUN_LENGTH,
                   help="consecutive above-mean sums required at a ROI boundary (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evtrack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic event stream and its ground truth")
    p.add_argument("spec")
    p.add_argument("out_events")
    p.add_argument("out_truth")
    p.add_argument("--binary", action="store_true", help="write events in the binary format")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("frames", help="dump intensity images (PGM) and ROIs")
    p.add_argument("events")
    p.add_argument("out_dir")
    _add_framing(p)
    p.set_defaults(func=cmd_frames)

    p = sub.add_parser("calibrate", help="fit the depth model from distance/side records")
    p.add_argument("records")
    p.add_argument("out_calib")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("track", help="estimate the object trajectory from an event file")
    p.add_argument("events")
    p.add_argument("calibration")
    p.add_argument("out_traj")
    _add_framing(p)
    p.add_argument("-l", "--smooth-window", type=_positive_int, default=tracker.DEFAULT_SMOOTHING_LENGTH,
                   help="moving-average length in frames (default %(default)s)")
    p.add_argument("--min-active-fraction", type=_fraction, default=tracker.DEFAULT_MIN_ACTIVE_FRACTION,
                   help="minimum active-pixel fraction of a valid ROI (default %(default)s)")
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("eval", help="DTW error between two trajectories, in millimetres")
    p.add_argument("traj_a")
    p.add_argument("traj_b")
    p.add_argument("out_report", nargs="?", default=None)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"evtrack: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        # every format/validation error in the package derives from ValueError
        print(f"evtrack: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
