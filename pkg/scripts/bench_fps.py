"""Single-threaded throughput on 480x360 synthetic frames.

    python scripts/bench_fps.py [--frames 100] [--repeats 3] [--profile]
"""
import argparse
import cProfile
import pstats
import time

from situp.dataset import SynthSpec, synth_sequence
from situp.tracker import SitupTracker, TrackerConfig


def track(seq):
    trk = SitupTracker(TrackerConfig())
    trk.init(seq.frames[0], seq.init_box)
    tic = time.perf_counter()
    for frame in seq.frames[1:]:
        trk.step(frame)
    return (len(seq) - 1) / (time.perf_counter() - tic), trk.model.xhat.shape


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=100)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--profile", action="store_true")
    args = ap.parse_args()
    seq = synth_sequence(SynthSpec.build(args.frames, start=(200, 160), velocity=(1.0, 0.5),
                                         scale_rate=1.003))
    if args.profile:
        prof = cProfile.Profile()
        prof.runcall(track, seq)
        pstats.Stats(prof).sort_stats("cumulative").print_stats(15)
        return
    for i in range(args.repeats):
        fps, shape = track(seq)
        print(f"run {i + 1}: {fps:.1f} fps (feature grid {shape[1]}x{shape[0]}x{shape[2]})")


if __name__ == "__main__":
    main()
