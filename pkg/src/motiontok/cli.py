"""Command-line entry point.

Exit codes: 0 success, 1 validation or usage error, 2 I/O or format error.
Data goes to stdout (JSON for analytic commands) or ``--out``; diagnostics go
to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .compression import compress_video, token_budget, write_compressed_dump
from .config import CONFIG_ENV_VAR, load_config
from .dataset import (
    ConstantScorer,
    LookupScorer,
    SeededRandomScorer,
    build_dataset,
    dataset_stats,
    read_samples,
    write_samples,
)
from .errors import FormatError, MotionTokError
from .features_io import _atomic_write_bytes, read_feature_dump, read_trajectories, write_feature_dump
from .fixtures import PATTERNS, gen_fixture
from .position_codec import (
    QuantizedTime,
    dequantize_coord,
    dequantize_time,
    quantize_coord,
    quantize_time,
)
from .segmentation import change_rate_series, segment_events, similarity_series

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2

log = logging.getLogger("motiontok")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _dump(obj):
    print(json.dumps(obj))


def _config(args, **overrides):
    return load_config(getattr(args, "config", None), overrides)


def cmd_segment(args):
    cfg = _config(args, K=args.k)
    v = read_feature_dump(args.input)
    seg = segment_events(v, cfg.K)
    out = seg.to_json()
    if args.emit_series:
        sims = similarity_series(v) if v.num_frames >= 2 else None
        out["similarity"] = list(sims.values) if sims else []
        out["change_rate"] = list(change_rate_series(sims).values) if v.num_frames >= 3 else []
    _dump(out)


def cmd_compress(args):
    cfg = _config(args, K=args.k, s=args.s, Z=args.z)
    v = read_feature_dump(args.input)
    c = compress_video(v, cfg.K, cfg.s, cfg.Z)
    write_compressed_dump(c, args.out)
    _dump(c.budget_json())


def cmd_budget(args):
    cfg = _config(args, T=args.t, h=args.h, w=args.w, K=args.k, s=args.s)
    print(token_budget(cfg.T, cfg.h, cfg.w, cfg.K, cfg.s, args.with_time))


def cmd_quantize(args):
    if args.mode == "time":
        print(quantize_time(args.value, args.extent, args.resolution).z)
    else:
        print(quantize_coord(args.value, args.extent, args.resolution))


def cmd_dequantize(args):
    if args.mode == "time":
        print(repr(dequantize_time(QuantizedTime(args.value, args.resolution), args.extent)))
    else:
        print(repr(dequantize_coord(args.value, args.extent, args.resolution)))


def make_scorer(choice):
    """Parse ``constant[:value]``, ``random[:seed]`` or ``lookup:<json file>``."""
    kind, _, arg = choice.partition(":")
    if kind == "constant":
        return ConstantScorer(float(arg) if arg else 1.0)
    if kind == "random":
        return SeededRandomScorer(int(arg) if arg else 0)
    if kind == "lookup" and arg:
        with open(arg, "r", encoding="utf-8") as fh:
            table = json.load(fh)
        return LookupScorer(table, float(table.pop("__default__", 0.0)))
    raise argparse.ArgumentTypeError(f"bad scorer choice {choice!r}")


def cmd_build_dataset(args):
    cfg = _config(args, seed=args.seed, emit_all_tasks=args.emit_all_tasks or None)
    bad_lines = []
    records = list(read_trajectories(args.records, strict=False, rejects=bad_lines))
    samples, report = build_dataset(
        records, cfg.filter, args.scorer, cfg.seed,
        task_weights=cfg.task_weights, render=cfg.render_config(),
        emit_all_tasks=cfg.emit_all_tasks, workers=args.workers,
    )
    write_samples(samples, args.out)
    summary = report.to_json()
    summary["invalid_lines"] = len(bad_lines)
    summary["samples"] = len(samples)
    if args.report:
        _atomic_write_bytes(args.report, (json.dumps(summary, indent=2) + "\n").encode("utf-8"))
    for lineno, msg in bad_lines:
        print(f"skipped {msg}", file=sys.stderr)
    print(
        f"{report.accepted}/{report.inputs} records accepted, {len(samples)} samples, "
        f"{len(bad_lines)} invalid line(s)",
        file=sys.stderr,
    )
    _dump(summary)


def cmd_stats(args):
    records = list(read_trajectories(args.records))
    samples = read_samples(args.samples) if args.samples else None
    _dump(dataset_stats(records, args.bin, samples))


def cmd_gen_fixture(args):
    v = gen_fixture(args.pattern, args.t, args.h, args.w, args.d, seed=args.seed,
                    duration_s=args.duration, video_id=args.video_id)
    write_feature_dump(v, args.out)
    print(f"wrote {v.num_frames} frames of shape {v.frame_shape} to {args.out}", file=sys.stderr)


def build_parser():
    p = _Parser(prog="motiontok", description="Event-aware video token compression and instruction-data tooling.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV_VAR})")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")

    sp = sub.add_parser("segment", help="segment a feature dump into events")
    sp.add_argument("--input", required=True)
    sp.add_argument("--k", type=int)
    sp.add_argument("--emit-series", action="store_true")
    sp.set_defaults(func=cmd_segment)

    sp = sub.add_parser("compress", help="write a compressed (IMVC) dump")
    sp.add_argument("--input", required=True)
    sp.add_argument("--k", type=int)
    sp.add_argument("--s", type=int)
    sp.add_argument("--z", type=int)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_compress)

    sp = sub.add_parser("budget", help="print the visual token count")
    for name in ("t", "h", "w", "k", "s"):
        sp.add_argument(f"--{name}", type=int)
    sp.add_argument("--with-time", action="store_true")
    sp.set_defaults(func=cmd_budget)

    for name, func, vtype in (("quantize", cmd_quantize, float), ("dequantize", cmd_dequantize, int)):
        sp = sub.add_parser(name, help=f"{name} a timestamp or coordinate")
        sp.add_argument("--mode", choices=("time", "coord"), required=True)
        sp.add_argument("--value", type=vtype, required=True)
        sp.add_argument("--extent", type=float, required=True, help="duration (s) or frame extent (px)")
        sp.add_argument("--resolution", type=int, required=True)
        sp.set_defaults(func=func)

    sp = sub.add_parser("build-dataset", help="build instruction samples from trajectory JSONL")
    sp.add_argument("--records", required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", required=True)
    sp.add_argument("--report")
    sp.add_argument("--scorer", type=make_scorer, default=ConstantScorer(1.0),
                    help="constant[:v] | random[:seed] | lookup:<json> (default constant:1.0)")
    sp.add_argument("--emit-all-tasks", action="store_true")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_build_dataset)

    sp = sub.add_parser("stats", help="duration and interval histograms")
    sp.add_argument("--records", required=True)
    sp.add_argument("--bin", type=float, required=True)
    sp.add_argument("--samples", help="optional sample JSONL for per-task totals")
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("gen-fixture", help="write a synthetic feature dump")
    sp.add_argument("--pattern", choices=PATTERNS, default="two-block")
    sp.add_argument("--t", type=int, default=6)
    sp.add_argument("--h", type=int, default=2)
    sp.add_argument("--w", type=int, default=2)
    sp.add_argument("--d", type=int, default=4)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--duration", type=float)
    sp.add_argument("--video-id")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_gen_fixture)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_help(sys.stderr)
            return EXIT_VALIDATION
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        args.func(args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_VALIDATION
    except (FormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (MotionTokError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
