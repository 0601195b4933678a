"""Track every committed synthetic fixture and print per-sequence metrics.

    python scripts/run_fixtures.py [--pool 1.0] [--criterion maxresp]
"""
import argparse
from pathlib import Path

import numpy as np

from situp.dataset import synth_sequence, synth_spec_from_file
from situp.evaluation import evaluate_sequence
from situp.scale import ScalePool
from situp.tracker import TrackerConfig, run_sequence

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pool", help="comma-separated scale factors")
    ap.add_argument("--criterion", default="apce", choices=("apce", "maxresp"))
    args = ap.parse_args()
    pool = ScalePool.parse(args.pool) if args.pool else ScalePool()
    cfg = TrackerConfig(criterion=args.criterion, pool=pool)

    print(f"{'sequence':16s} {'AUC':>6s} {'P@20':>6s} {'err':>7s} {'area':>7s} {'fps':>6s}")
    for spec_path in sorted(FIXTURES.glob("*.spec")):
        seq = synth_sequence(synth_spec_from_file(spec_path))
        res = run_sequence(seq.frames, seq.init_box, cfg)
        pred = [b.to_corner() for b in res.boxes]
        ev = evaluate_sequence(seq.name, pred, seq.groundtruth)
        g = seq.groundtruth[-1]
        area = abs(pred[-1][2] * pred[-1][3] - g[2] * g[3]) / (g[2] * g[3])
        print(f"{seq.name:16s} {ev.auc:6.3f} {ev.precision_20:6.3f} "
              f"{np.mean(ev.errors):7.2f} {area:7.3f} {res.fps:6.1f}")


if __name__ == "__main__":
    main()
