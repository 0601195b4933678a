"""Scale-criterion ablation: APCE versus maximum response on one sequence.

Both runs share every setting except ``TrackerConfig.criterion``.
"""
from dataclasses import dataclass, replace

import numpy as np

from .evaluation import iou
from .fileio import atomic_write
from .tracker import TrackerConfig, run_sequence

ABLATION_HEADER = "frame,iou_apce,iou_maxresp,scale_ratio_apce,scale_ratio_maxresp"


@dataclass
class AblationReport:
    name: str
    iou: dict            # criterion -> per-frame IoU list
    scale_ratio: dict    # criterion -> per-frame predicted/true width

    @property
    def frames(self):
        return len(self.iou["apce"])

    def mean_iou(self, criterion):
        return float(np.mean(self.iou[criterion][1:])) if self.frames > 1 else 1.0

    def final_scale_error(self, criterion):
        return abs(self.scale_ratio[criterion][-1] - 1.0)

    def to_csv(self):
        rows = [ABLATION_HEADER]
        for j in range(self.frames):
            rows.append(f"{j + 1},{self.iou['apce'][j]:.6f},{self.iou['maxresp'][j]:.6f},"
                        f"{self.scale_ratio['apce'][j]:.6f},"
                        f"{self.scale_ratio['maxresp'][j]:.6f}")
        return "\n".join(rows) + "\n"

    def summary_csv(self):
        rows = ["criterion,mean_iou,final_scale_error"]
        for c in ("apce", "maxresp"):
            rows.append(f"{c},{self.mean_iou(c):.6f},{self.final_scale_error(c):.6f}")
        return "\n".join(rows) + "\n"

    def write(self, out_dir):
        atomic_write(f"{out_dir}/ablation.csv", self.to_csv())
        atomic_write(f"{out_dir}/summary.csv", self.summary_csv())


def apce_vs_maxresponse(seq, cfg=None, table="default"):
    """Track ``seq`` twice, once per scale criterion, and compare against ground truth."""
    cfg = cfg or TrackerConfig()
    gt = seq.groundtruth
    ious, ratios = {}, {}
    for criterion in ("apce", "maxresp"):
        result = run_sequence(seq.frame_loaders(), seq.init_box,
                              replace(cfg, criterion=criterion), table)
        pred = [b.to_corner() for b in result.boxes]
        ious[criterion] = [iou(p, g) for p, g in zip(pred, gt)]
        ratios[criterion] = [p[2] / g[2] for p, g in zip(pred, gt)]
    return AblationReport(seq.name, ious, ratios)
