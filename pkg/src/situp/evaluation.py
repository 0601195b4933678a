"""One-pass evaluation: center error, IoU, precision/success curves and reports.

Boxes are OTB corner tuples ``(x, y, w, h)``. The first frame (the
initialization frame) is excluded by default. Success uses a strict
``IoU > threshold`` over 21 thresholds ``0, 0.05, ..., 1`` and AUC is the
mean of the success curve.
"""
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import ATTRIBUTES
from .errors import EmptyTrajectory, UnknownAttribute
from .fileio import atomic_write

PRECISION_THRESHOLDS = np.arange(51, dtype=np.float64)
SUCCESS_THRESHOLDS = np.arange(21) / 20.0

TABLE_HEADER = "method,slice,AUC,precision_20,fps"
SEQUENCE_HEADER = "method,sequence,frames,AUC,precision_20,mean_center_error,mean_iou"


def box_center(box):
    x, y, w, h = box
    return x + (w - 1) / 2, y + (h - 1) / 2


def center_error(pred, gt):
    (px, py), (gx, gy) = box_center(pred), box_center(gt)
    return math.hypot(px - gx, py - gy)


def iou(pred, gt):
    ax, ay, aw, ah = pred
    bx, by, bw, bh = gt
    # clipping to the smaller extent keeps identical boxes at exactly 1
    iw = max(0.0, min(ax + aw, bx + bw) - max(ax, bx))
    ih = max(0.0, min(ay + ah, by + bh) - max(ay, by))
    iw, ih = min(iw, aw, bw), min(ih, ah, bh)
    inter = iw * ih
    union = aw * ah + bw * bh - inter
    return inter / union if union > 0 else 0.0


def _nonempty(values):
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyTrajectory("no frames to evaluate")
    return values


def precision_curve(errors, thresholds=PRECISION_THRESHOLDS):
    """Fraction of frames with center error at most each threshold."""
    errors = _nonempty(errors)
    return (errors[None, :] <= thresholds[:, None]).mean(axis=1)


def success_curve(ious, thresholds=SUCCESS_THRESHOLDS):
    """Fraction of frames with IoU strictly above each threshold."""
    ious = _nonempty(ious)
    return (ious[None, :] > thresholds[:, None]).mean(axis=1)


def auc(curve):
    return float(np.mean(curve))


def precision_at(curve, threshold=20):
    return float(curve[int(np.flatnonzero(PRECISION_THRESHOLDS == threshold)[0])])


def _valid_gt(box):
    return all(math.isfinite(v) for v in box) and box[2] > 0 and box[3] > 0


@dataclass
class SequenceResult:
    name: str
    errors: list
    ious: list
    attributes: frozenset = frozenset()
    frames: int = 0
    step_seconds: float = 0.0

    @property
    def precision(self):
        return precision_curve(self.errors)

    @property
    def success(self):
        return success_curve(self.ious)

    @property
    def auc(self):
        return auc(self.success)

    @property
    def precision_20(self):
        return precision_at(self.precision)


def evaluate_sequence(name, pred, gt, attributes=frozenset(), include_first=False,
                      step_seconds=0.0):
    """Per-frame errors and overlaps; frames with invalid ground truth are skipped."""
    if len(pred) != len(gt):
        raise ValueError(f"{name}: {len(pred)} predictions for {len(gt)} frames")
    start = 0 if include_first else 1
    pairs = [(p, g) for p, g in zip(pred[start:], gt[start:]) if _valid_gt(g)]
    if not pairs:
        raise EmptyTrajectory(f"{name}: no evaluable frames")
    return SequenceResult(name, [center_error(p, g) for p, g in pairs],
                          [iou(p, g) for p, g in pairs], frozenset(attributes),
                          len(pred), step_seconds)


@dataclass
class SliceReport:
    slice: str
    sequences: list
    precision: np.ndarray
    success: np.ndarray
    fps: float = float("nan")

    @property
    def auc(self):
        return auc(self.success)

    @property
    def precision_20(self):
        return precision_at(self.precision)


def aggregate(results, attribute=None, slice_name=None):
    """Average curves over sequences, each sequence weighted equally.

    ``attribute`` restricts to sequences carrying that tag.
    """
    if attribute is not None:
        attribute = attribute.upper()
        if attribute not in ATTRIBUTES:
            raise UnknownAttribute(f"{attribute!r} is not one of {', '.join(ATTRIBUTES)}")
        results = [r for r in results if attribute in r.attributes]
    results = sorted(results, key=lambda r: r.name)
    if not results:
        raise EmptyTrajectory(f"no sequences in slice {attribute or 'overall'}")
    prec = np.mean([r.precision for r in results], axis=0)
    succ = np.mean([r.success for r in results], axis=0)
    steps = sum(r.frames - 1 for r in results)
    secs = sum(r.step_seconds for r in results)
    fps = steps / secs if secs > 0 else float("nan")
    return SliceReport(slice_name or attribute or "overall", [r.name for r in results],
                       prec, succ, fps)


def slice_reports(results, attribute=None):
    """Overall report plus one per attribute present (or just ``attribute``)."""
    if attribute is not None:
        return [aggregate(results, attribute)]
    out = [aggregate(results)]
    present = set().union(*(r.attributes for r in results))
    out += [aggregate(results, a) for a in ATTRIBUTES if a in present]
    return out


def _fmt(v):
    return f"{v:.6f}"


def write_report(out_dir, method, results, reports, timing=False):
    """Write table, per-sequence and curve CSVs under ``out_dir``.

    The fps column is left empty unless ``timing`` is set, so default reports
    are byte-for-byte reproducible.
    """
    out_dir = Path(out_dir)
    rows = [TABLE_HEADER]
    for rep in reports:
        fps = _fmt(rep.fps) if timing and math.isfinite(rep.fps) else ""
        rows.append(f"{method},{rep.slice},{_fmt(rep.auc)},{_fmt(rep.precision_20)},{fps}")
    atomic_write(out_dir / "table.csv", "\n".join(rows) + "\n")

    rows = [SEQUENCE_HEADER]
    for r in sorted(results, key=lambda r: r.name):
        rows.append(f"{method},{r.name},{r.frames},{_fmt(r.auc)},{_fmt(r.precision_20)},"
                    f"{_fmt(np.mean(r.errors))},{_fmt(np.mean(r.ious))}")
    atomic_write(out_dir / "sequences.csv", "\n".join(rows) + "\n")

    for rep in reports:
        for kind, thresholds, curve in (("precision", PRECISION_THRESHOLDS, rep.precision),
                                        ("success", SUCCESS_THRESHOLDS, rep.success)):
            text = "threshold,value\n" + "".join(
                f"{_fmt(t)},{_fmt(v)}\n" for t, v in zip(thresholds, curve))
            atomic_write(out_dir / "curves" / f"{method}_{rep.slice}_{kind}.csv", text)
