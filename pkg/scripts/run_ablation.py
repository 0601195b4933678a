"""APCE vs max-response scale selection across renderer seeds.

Re-renders the zoom and zoom+occlusion fixtures under several seeds and
reports mean IoU for each criterion, to show how much the comparison
depends on the particular texture draw.

    python scripts/run_ablation.py [--seeds 0-7]
"""
import argparse
from dataclasses import replace
from pathlib import Path

from situp.ablation import apce_vs_maxresponse
from situp.dataset import synth_sequence, synth_spec_from_file

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", default="0-7", help="inclusive range a-b")
    args = ap.parse_args()
    lo, hi = (int(v) for v in args.seeds.split("-"))
    print(f"{'fixture':16s} {'seed':>4s} {'apce':>6s} {'maxresp':>7s}")
    for name in ("zoom", "zoom_occlusion"):
        spec = synth_spec_from_file(FIXTURES / f"{name}.spec")
        for seed in range(lo, hi + 1):
            rep = apce_vs_maxresponse(synth_sequence(replace(spec, seed=seed)))
            print(f"{name:16s} {seed:4d} {rep.mean_iou('apce'):6.3f} "
                  f"{rep.mean_iou('maxresp'):7.3f}")


if __name__ == "__main__":
    main()
