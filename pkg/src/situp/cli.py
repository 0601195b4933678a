"""Command-line entry point: ``situp {track,eval,synth,ablate}``.

Exit codes: 0 success, 1 usage or data error, 2 internal invariant violation.
"""
import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from .ablation import apce_vs_maxresponse
from .dataset import (find_sequences, format_box, load_otb, synth_sequence,
                      synth_spec_from_file, write_otb)
from .errors import SitupError
from .evaluation import evaluate_sequence, slice_reports, write_report
from .fileio import atomic_write
from .scale import CRITERIA, ScalePool
from .tracker import TrackerConfig, load_config, run_sequence

log = logging.getLogger("situp")

EXIT_OK, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2
TRACK_HEADER = "frame,x,y,w,h"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _add_tracker_flags(p):
    p.add_argument("--config", type=Path, help="key = value tracker config file")
    p.add_argument("--pool", help="comma-separated scale factors, e.g. 0.99,1.0,1.01")
    p.add_argument("--criterion", choices=CRITERIA, help="scale selection criterion")


def build_parser():
    ap = _Parser(prog="situp", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("track", help="track one OTB-format sequence")
    p.add_argument("--seq", type=Path, required=True, help="sequence directory")
    p.add_argument("--out", type=Path, required=True,
                   help="box file (frame,x,y,w,h); diagnostics go to OUT.diag.csv")
    _add_tracker_flags(p)

    p = sub.add_parser("eval", help="one-pass evaluation over a dataset root")
    p.add_argument("--root", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--attr", help="restrict the report to one attribute tag, e.g. SV")
    p.add_argument("--parallel", type=int, default=1, help="worker processes")
    p.add_argument("--method", default="SITUP", help="method name in report rows")
    p.add_argument("--include-first", action="store_true",
                   help="count the initialization frame in the metrics")
    p.add_argument("--timing", action="store_true",
                   help="fill the fps column (makes reports run-dependent)")
    _add_tracker_flags(p)

    p = sub.add_parser("synth", help="render a synthetic sequence to OTB format")
    p.add_argument("--spec", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("ablate", help="APCE vs max-response scale criterion")
    p.add_argument("--seq", type=Path, required=True,
                   help="sequence directory or synthetic spec file")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--config", type=Path)
    p.add_argument("--pool")
    return ap


def tracker_config(args):
    cfg = load_config(args.config) if getattr(args, "config", None) else TrackerConfig()
    if getattr(args, "pool", None):
        cfg = replace(cfg, pool=ScalePool.parse(args.pool))
    if getattr(args, "criterion", None):
        cfg = replace(cfg, criterion=args.criterion)
    return cfg


def _load_any(path):
    path = Path(path)
    if path.is_file():
        return synth_sequence(synth_spec_from_file(path))
    return load_otb(path)


def track_text(result):
    rows = [TRACK_HEADER] + [f"{i},{format_box(b.to_corner())}"
                             for i, b in enumerate(result.boxes, 1)]
    return "\n".join(rows) + "\n"


def diagnostics_text(result, pool):
    head = "frame,chosen_factor,peak_value,no_confidence," + ",".join(
        f"apce_{t:g}" for t in pool.factors)
    rows = [head]
    for d in result.diagnostics:
        rows.append(f"{d.frame_index + 1},{d.chosen_factor:g},{d.peak_value:.6f},"
                    f"{int(d.no_confidence)}," + ",".join(f"{a:.6f}" for a in d.per_scale_apce))
    return "\n".join(rows) + "\n"


def cmd_track(args):
    cfg = tracker_config(args)
    seq = load_otb(args.seq)
    result = run_sequence(seq.frame_loaders(), seq.init_box, cfg)
    atomic_write(args.out, track_text(result))
    atomic_write(f"{args.out}.diag.csv", diagnostics_text(result, cfg.pool))
    if not result.complete:
        log.error("%s: stopped after %d frames: %s", seq.name, len(result.boxes), result.error)
        return EXIT_DATA
    print(f"{seq.name}: {len(result.boxes)} frames -> {args.out}")
    return EXIT_OK


def _eval_one(job):
    """Worker: track one sequence and write its trajectory. Returns (name, result, error)."""
    seq_dir, out_dir, cfg, include_first = job
    try:
        seq = load_otb(seq_dir)
        result = run_sequence(seq.frame_loaders(), seq.init_box, cfg)
        atomic_write(Path(out_dir) / "trajectories" / f"{seq.name}.txt", track_text(result))
        if not result.complete:
            return seq.name, None, result.error
        pred = [b.to_corner() for b in result.boxes]
        return seq.name, evaluate_sequence(seq.name, pred, seq.groundtruth, seq.attributes,
                                           include_first, result.step_seconds), None
    except (SitupError, OSError, ValueError) as exc:
        return Path(seq_dir).name, None, str(exc)


def cmd_eval(args):
    cfg = tracker_config(args)
    dirs = find_sequences(args.root) if args.root.is_dir() else []
    jobs = [(d, args.out, cfg, args.include_first) for d in dirs]
    if args.parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.parallel) as pool:
            outcomes = list(pool.map(_eval_one, jobs))
    else:
        outcomes = [_eval_one(j) for j in jobs]

    outcomes.sort(key=lambda o: o[0])
    results = [r for _, r, _ in outcomes if r is not None]
    failed = [(n, e) for n, r, e in outcomes if r is None]
    for name, err in failed:
        log.error("%s: excluded: %s", name, err)
    if not results:
        log.error("no sequences evaluated under %s", args.root)
        return EXIT_DATA
    reports = slice_reports(results, args.attr)
    write_report(args.out, args.method, results, reports, timing=args.timing)
    for rep in reports:
        print(f"{args.method} {rep.slice}: {len(rep.sequences)} sequences, "
              f"AUC {rep.auc:.3f}, precision@20 {rep.precision_20:.3f}")
    if failed:
        print(f"{len(failed)} sequence(s) failed and were excluded")
    return EXIT_OK


def cmd_synth(args):
    spec = synth_spec_from_file(args.spec)
    seq = synth_sequence(spec)
    write_otb(seq, args.out)
    print(f"{seq.name}: {len(seq)} frames -> {args.out}")
    return EXIT_OK


def cmd_ablate(args):
    cfg = tracker_config(args)
    seq = _load_any(args.seq)
    report = apce_vs_maxresponse(seq, cfg)
    report.write(args.out)
    for c in ("apce", "maxresp"):
        print(f"{c}: mean IoU {report.mean_iou(c):.3f}, "
              f"final scale error {report.final_scale_error(c):.3f}")
    return EXIT_OK


COMMANDS = {"track": cmd_track, "eval": cmd_eval, "synth": cmd_synth, "ablate": cmd_ablate}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_DATA
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (SitupError, OSError, ValueError) as exc:
        print(f"situp {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AssertionError as exc:
        print(f"situp {args.command}: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
