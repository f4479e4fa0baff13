"""Command-line interface: ``nbekcf track | bench | selftest``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time

import numpy as np
from scipy.linalg import LinAlgError

from .acsii import autocorrelation
from .ccim import circulant_correlation
from .oracle import MAX_ORACLE_SIZE, brute_circulant_correlation

log = logging.getLogger("nbekcf")

KERNEL_ALIASES = {"gaussian": "gaussian", "linear": "linear", "poly": "polynomial",
                  "polynomial": "polynomial"}


def _box_arg(text: str):
    from .io import parse_box
    try:
        return parse_box(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid box {text!r}: {exc}") from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nbekcf", description="Circulant-filter kernel tracker and fast correlation tools.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("track", help="track a target through an image sequence")
    t.add_argument("--seq", required=True, help="directory of frames (read in filename order)")
    t.add_argument("--init", required=True, type=_box_arg, help="initial box x,y,w,h (0-indexed pixels)")
    t.add_argument("--gt", help="ground-truth file (OTB format, 1-indexed)")
    t.add_argument("--out", required=True, help="output CSV of per-frame boxes")
    t.add_argument("--metrics", help="output JSON of metrics (requires --gt)")
    t.add_argument("--sigma", type=float, default=4.0)
    t.add_argument("--lambda", dest="lam", type=float, default=1e-4)
    t.add_argument("--gamma", type=float, default=0.01)
    t.add_argument("--cell", type=_positive_int, default=4)
    t.add_argument("--search-factor", type=float, default=3.0)
    t.add_argument("--scale-steps", type=_positive_int, default=1)
    t.add_argument("--scale-ratio", type=float, default=1.02)
    t.add_argument("--kernel", choices=sorted(KERNEL_ALIASES), default="gaussian")
    t.add_argument("--template-interp", action="store_true",
                   help="blend the base filter towards each new template")
    t.set_defaults(func=run_track)

    b = sub.add_parser("bench", help="time CCIM / ACSII / brute-force correlation")
    b.add_argument("--m", type=_positive_int, default=15)
    b.add_argument("--n", type=_positive_int, default=20)
    b.add_argument("--M", type=_positive_int, default=60)
    b.add_argument("--N", type=_positive_int, default=60)
    b.add_argument("--D", type=_positive_int, default=41)
    b.add_argument("--iters", type=_positive_int, default=10)
    b.add_argument("--method", choices=("ccim", "acsii", "brute", "all"), default="all")
    b.add_argument("--seed", type=int, default=42)
    b.set_defaults(func=run_bench)

    s = sub.add_parser("selftest", help="randomized oracle-equivalence checks")
    s.add_argument("--cases", type=_nonneg_int, default=100)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--inject-fault", action="store_true",
                   help="flip a realignment shift sign in CCIM (the run must then fail)")
    s.set_defaults(func=run_selftest)
    return p


def run_track(args) -> int:
    from .eval import summarize
    from .io import list_sequence, load_groundtruth, write_metrics, write_results
    from .tracker import TrackerConfig, track_sequence

    if args.metrics and not args.gt:
        log.warning("--metrics given without --gt; no metrics written")
    try:
        cfg = TrackerConfig(cell_size=args.cell, sigma=args.sigma, lam=args.lam, gamma=args.gamma,
                            search_factor=args.search_factor, scale_steps=args.scale_steps,
                            scale_ratio=args.scale_ratio, kernel=KERNEL_ALIASES[args.kernel],
                            interpolate_template=args.template_interp)
    except ValueError as exc:
        print(f"nbekcf track: error: {exc}", file=sys.stderr)
        return 2
    frames = list_sequence(args.seq)
    t0 = time.perf_counter()
    boxes = track_sequence(frames, args.init, cfg)
    elapsed = time.perf_counter() - t0
    write_results(args.out, boxes)
    if args.gt:
        gt = load_groundtruth(args.gt)
        if len(gt) != len(boxes):
            raise ValueError(f"ground truth has {len(gt)} boxes for {len(boxes)} frames")
        metrics = summarize(boxes, gt)
        print(f"mean center error: {metrics.mean_center_error:.3f} px  "
              f"DP@20: {metrics.distance_precision:.4f}  OP@0.5: {metrics.overlap_precision:.4f}  "
              f"AUC: {metrics.auc:.4f}")
        if args.metrics:
            write_metrics(args.metrics, metrics)
    fps = len(boxes) / elapsed if elapsed > 0 else float("inf")
    print(f"frames: {len(boxes)}  mean FPS: {fps:.2f}")
    return 0


def median_time_ms(fn, iters: int) -> float:
    """Median wall time of ``fn()`` over ``iters`` calls after one warmup, in ms."""
    fn()
    times = []
    for _ in range(iters):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times)) * 1e3


def run_bench(args) -> int:
    m, n, M, N, D = args.m, args.n, args.M, args.N, args.D
    if m > M or n > N:
        print(f"nbekcf bench: error: filter {m}x{n} larger than signal {M}x{N}", file=sys.stderr)
        return 2
    brute_ok = M <= MAX_ORACLE_SIZE and N <= MAX_ORACLE_SIZE
    if args.method == "brute" and not brute_ok:
        print(f"nbekcf bench: error: brute force limited to M, N <= {MAX_ORACLE_SIZE}", file=sys.stderr)
        return 2
    rng = np.random.default_rng(args.seed)
    x = rng.standard_normal((m, n, D))
    z = rng.standard_normal((M, N, D))
    runs = {
        "ccim": lambda: circulant_correlation(x, z),
        "acsii": lambda: autocorrelation(z, m, n),
        "brute": lambda: brute_circulant_correlation(x, z),
    }
    methods = ["ccim", "acsii", "brute"] if args.method == "all" else [args.method]
    if not brute_ok and "brute" in methods:
        methods.remove("brute")
        print(f"# brute skipped: oracle limited to M, N <= {MAX_ORACLE_SIZE}")
    times = {k: median_time_ms(runs[k], args.iters) for k in methods}
    print(f"{'method':<8}{'m':>4}{'n':>4}{'M':>5}{'N':>5}{'D':>5}{'iters':>7}{'median_ms':>13}{'speedup':>10}")
    for k in methods:
        speed = "-"
        if k == "ccim" and "brute" in times:
            speed = f"{times['brute'] / times['ccim']:.2f}x"
        print(f"{k:<8}{m:>4}{n:>4}{M:>5}{N:>5}{D:>5}{args.iters:>7}{times[k]:>13.3f}{speed:>10}")
    return 0


def run_selftest(args) -> int:
    from .selftest import run_selftest as _run

    if args.cases == 0:
        log.warning("--cases 0: nothing to check")
        print("selftest: 0 cases requested; trivially passing")
        return 0
    report = _run(args.cases, args.seed, inject_fault=args.inject_fault)
    for s in report.suites:
        print(f"{s.name:<10} {s.passed}/{s.total} passed")
    bad = report.first_failure
    if bad is not None:
        print(f"FAIL {bad.name}: {bad.failure}")
        return 1
    print("selftest: all suites passed")
    return 0


def _limit_threads():
    """Honour NBEKCF_THREADS (0 or unset = library default) when threadpoolctl is available."""
    raw = os.environ.get("NBEKCF_THREADS", "").strip()
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        log.warning("ignoring non-integer NBEKCF_THREADS=%r", raw)
        return None
    if n <= 0:
        return None
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        log.warning("threadpoolctl not installed; NBEKCF_THREADS ignored")
        return None
    return threadpool_limits(limits=n)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    limiter = _limit_threads()
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError, LinAlgError) as exc:
        print(f"nbekcf {args.command}: error: {exc}", file=sys.stderr)
        return 1
    finally:
        if limiter is not None:
            limiter.restore_original_limits()


if __name__ == "__main__":
    sys.exit(main())
