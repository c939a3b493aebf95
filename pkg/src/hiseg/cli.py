"""Command-line surface: segment, multiscale, eval, bench."""

import argparse
import os
import statistics
import sys
import time

import numpy as np

from .extract import Segmentation, extract, extract_many
from .features import FeatureConfig
from .hierarchy import build_hierarchy
from .metrics import GroundTruth, evaluate
from .pnm import read_edge_map, read_image, read_labels, write_labels, write_overlay


def _add_feature_flags(p):
    p.add_argument("--hist-iter", type=int, default=4, metavar="J",
                   help="round at which histogram distance takes over (default 4)")
    p.add_argument("--hist-bins", type=int, default=20, metavar="K",
                   help="histogram bins per channel (default 20)")
    p.add_argument("--edge-eps", type=float, default=0.01, metavar="E",
                   help="floor added to the average edge confidence (default 0.01)")
    p.add_argument("--lab", action="store_true",
                   help="work in CIELAB instead of the input RGB")


def _feature_config(args):
    return FeatureConfig(
        hist_switch_iter=args.hist_iter,
        hist_bins=args.hist_bins,
        edge_epsilon=args.edge_eps,
        color_space="lab" if args.lab else "rgb",
    )


def _load_inputs(args):
    img = read_image(args.input)
    edge_map = read_edge_map(args.edges) if args.edges else None
    if edge_map is not None:
        edge_map.check_matches(img)
    return img, edge_map


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="hiseg",
        description="Superpixel hierarchy: build once, extract any number of regions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="segment an image at one scale")
    p.add_argument("--input", required=True, help="input P5/P6 PNM image")
    p.add_argument("--edges", help="optional P5 edge-confidence map")
    p.add_argument("--k", type=int, required=True, help="number of regions")
    p.add_argument("--out", required=True, help="output label file")
    p.add_argument("--format", choices=["pgm16", "csv"], default="pgm16")
    p.add_argument("--overlay", help="optional P6 boundary overlay output")
    _add_feature_flags(p)

    p = sub.add_parser("multiscale", help="extract several scales from one build")
    p.add_argument("--input", required=True)
    p.add_argument("--edges")
    p.add_argument("--ks", required=True, help="comma-separated region counts")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--check-nesting", action="store_true",
                   help="verify that coarser scales nest the finer ones")
    _add_feature_flags(p)

    p = sub.add_parser("eval", help="score a label map against ground truth")
    p.add_argument("--labels", required=True)
    p.add_argument("--gt", action="append", required=True,
                   help="ground-truth label file; repeat to average several")
    p.add_argument("--eps", type=int, default=2, help="boundary tolerance in pixels")

    p = sub.add_parser("bench", help="time one build and a ladder of extractions")
    p.add_argument("--input", required=True)
    p.add_argument("--edges")
    p.add_argument("--repeat", type=int, default=1)
    _add_feature_flags(p)

    return parser


def _cmd_segment(args):
    img, edge_map = _load_inputs(args)
    n = img.pixel_count
    if not 1 <= args.k <= n:
        raise ValueError(f"k must be in [1, {n}]")
    cfg = _feature_config(args)
    t0 = time.perf_counter()
    h = build_hierarchy(img, edge_map, cfg)
    ms = (time.perf_counter() - t0) * 1000.0
    seg = extract(h, args.k)
    write_labels(seg, args.out, args.format)
    if args.overlay:
        write_overlay(img, seg, args.overlay)
    print(f"built n={n} rounds={h.iteration_count()} ms={ms:.1f}")
    return 0


def _cmd_multiscale(args):
    img, edge_map = _load_inputs(args)
    n = img.pixel_count
    try:
        ks = [int(v) for v in args.ks.split(",") if v.strip()]
    except ValueError:
        raise ValueError(f"could not parse --ks {args.ks!r}")
    if not ks:
        raise ValueError("--ks must name at least one scale")
    deduped = list(dict.fromkeys(ks))
    if len(deduped) != len(ks):
        print("warning: duplicate k values ignored", file=sys.stderr)
    ks = deduped
    for k in ks:
        if not 1 <= k <= n:
            raise ValueError(f"k must be in [1, {n}]")
    os.makedirs(args.out_dir, exist_ok=True)
    if not os.access(args.out_dir, os.W_OK):
        raise OSError(f"output directory {args.out_dir} is not writable")

    cfg = _feature_config(args)
    t0 = time.perf_counter()
    h = build_hierarchy(img, edge_map, cfg)
    build_ms = (time.perf_counter() - t0) * 1000.0
    print(f"built n={n} rounds={h.iteration_count()} ms={build_ms:.1f}")

    segs = []
    for k in ks:
        t0 = time.perf_counter()
        seg = extract(h, k)
        ms = (time.perf_counter() - t0) * 1000.0
        write_labels(seg, os.path.join(args.out_dir, f"labels_k{k}.pgm"), "pgm16")
        print(f"extracted k={k} ms={ms:.1f}")
        segs.append(seg)
    if args.check_nesting:
        order = sorted(range(len(ks)), key=lambda i: ks[i], reverse=True)
        for fine, coarse in zip(order, order[1:]):
            _assert_nested(segs[fine], segs[coarse])
        print("nesting ok")
    return 0


def _assert_nested(fine: Segmentation, coarse: Segmentation):
    pair = fine.labels.ravel() * np.int64(coarse.k) + coarse.labels.ravel()
    if np.unique(pair).size != fine.k:
        raise RuntimeError(
            f"nesting violated between k={fine.k} and k={coarse.k}"
        )


def _cmd_eval(args):
    labels = read_labels(args.labels)
    seg = Segmentation.from_raw_labels(labels)
    gts = []
    for path in args.gt:
        gt = GroundTruth(read_labels(path))
        if (gt.height, gt.width) != (seg.height, seg.width):
            raise ValueError(
                f"ground truth {path} is {gt.width}x{gt.height}, "
                f"labels are {seg.width}x{seg.height}"
            )
        gts.append(gt)
    print(evaluate(seg, gts, args.eps).line())
    return 0


def _cmd_bench(args):
    img, edge_map = _load_inputs(args)
    n = img.pixel_count
    cfg = _feature_config(args)
    repeat = max(args.repeat, 1)

    build_hierarchy(img, edge_map, cfg)  # warm-up (JIT compilation, caches)
    build_times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        h = build_hierarchy(img, edge_map, cfg)
        build_times.append((time.perf_counter() - t0) * 1000.0)
    build_ms = statistics.median(build_times)

    ladder = [k for k in range(100, 1001, 100) if k <= n] or [min(n, 1)]
    extract_times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        extract_many(h, ladder)
        extract_times.append((time.perf_counter() - t0) * 1000.0)
    extract_ms = statistics.median(extract_times)

    print(f"build_ms={build_ms:.1f}")
    print(f"extract_ladder_ms={extract_ms:.1f} scales={len(ladder)}")
    print(f"pixels_per_second={n / (build_ms / 1000.0):.0f}")
    return 0


_COMMANDS = {
    "segment": _cmd_segment,
    "multiscale": _cmd_multiscale,
    "eval": _cmd_eval,
    "bench": _cmd_bench,
}


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
