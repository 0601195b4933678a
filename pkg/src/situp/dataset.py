"""OTB-format sequences and synthetic sequences with exact ground truth.

On-disk layout (one directory per sequence)::

    <seq>/img/0001.jpg ...       frames, numbered; sorted by number
    <seq>/groundtruth_rect.txt   one "x,y,w,h" row per frame, 1-indexed corner
    <seq>/attrs.txt              optional, comma-separated attribute tags

Ground-truth rows may use commas, tabs or spaces as delimiters.
"""
import re
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np
from scipy.ndimage import gaussian_filter, uniform_filter

from .errors import (ConfigError, FrameCountMismatch, MissingGroundtruth, SpecOutOfFrame,
                     UnreadableFrame)
from .fileio import atomic_write, format_number, read_keyvalue
from .imageproc import Rect, sample_grid

ATTRIBUTES = ("IV", "OPR", "SV", "OCC", "DEF", "MB", "FM", "IPR", "OV", "BC", "LR")
IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png", ".bmp")
GROUNDTRUTH_NAMES = ("groundtruth_rect.txt", "groundtruth.txt")


@dataclass
class Sequence:
    name: str
    frames: list            # Paths, or in-memory arrays for synthetic sequences
    groundtruth: list       # (x, y, w, h) corner boxes, 1-indexed
    attributes: frozenset = frozenset()

    def __post_init__(self):
        if len(self.frames) != len(self.groundtruth):
            raise FrameCountMismatch(
                f"{self.name}: {len(self.frames)} frames, {len(self.groundtruth)} boxes")

    def __len__(self):
        return len(self.frames)

    @property
    def init_box(self):
        return Rect.from_corner(*self.groundtruth[0])

    def frame_loaders(self):
        """Zero-argument callables yielding each frame as an array."""
        return [(lambda f=f: f) if isinstance(f, np.ndarray) else (lambda f=f: read_frame(f))
                for f in self.frames]


def read_frame(path):
    """Decode an image to RGB ``(H, W, 3)``, or ``(H, W)`` if it is grayscale.

    Color files whose three channels are identical (common for grayscale OTB
    sequences stored as JPEG) are returned as single-channel.
    """
    img = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if img is None:
        raise UnreadableFrame(f"cannot decode {path}")
    if img.ndim == 3:
        img = img[:, :, :3]
        if img.shape[2] == 1 or (np.array_equal(img[:, :, 0], img[:, :, 1])
                                 and np.array_equal(img[:, :, 1], img[:, :, 2])):
            return np.ascontiguousarray(img[:, :, 0])
        return cv2.cvtColor(img, cv2.COLOR_BGR2RGB)
    return img


def parse_groundtruth(text):
    boxes = []
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        parts = [p for p in re.split(r"[,\s]+", line) if p]
        if len(parts) != 4:
            raise ValueError(f"groundtruth line {n}: expected 4 values, got {line!r}")
        boxes.append(tuple(float(p) for p in parts))
    return boxes


def _frame_number(path):
    digits = re.findall(r"\d+", path.stem)
    return (int(digits[-1]) if digits else -1, path.name)


def load_otb(directory, check_frames=False):
    """Load one OTB-format sequence directory (frames are decoded lazily)."""
    directory = Path(directory)
    gt_path = next((directory / n for n in GROUNDTRUTH_NAMES if (directory / n).is_file()), None)
    if gt_path is None:
        raise MissingGroundtruth(f"no groundtruth_rect.txt in {directory}")
    img_dir = directory / "img"
    frames = sorted((p for p in img_dir.glob("*") if p.suffix.lower() in IMAGE_SUFFIXES),
                    key=_frame_number) if img_dir.is_dir() else []
    if not frames:
        raise UnreadableFrame(f"no frames under {img_dir}")
    if check_frames:
        for p in frames:
            read_frame(p)
    attrs = frozenset()
    attr_path = directory / "attrs.txt"
    if attr_path.is_file():
        attrs = frozenset(t.strip().upper() for t in re.split(r"[,\s]+", attr_path.read_text())
                          if t.strip())
    return Sequence(directory.name, frames, parse_groundtruth(gt_path.read_text()), attrs)


def find_sequences(root):
    """Sorted list of sequence directories below ``root`` (those with an ``img/``)."""
    root = Path(root)
    return sorted(p for p in root.iterdir() if p.is_dir() and (p / "img").is_dir())


def format_box(box):
    return ",".join(format_number(v) for v in box)


def write_otb(seq, directory, frames=None):
    """Write ``seq`` as an OTB directory; PNG frames keep pixels exact."""
    directory = Path(directory)
    frames = seq.frames if frames is None else frames
    (directory / "img").mkdir(parents=True, exist_ok=True)
    for i, f in enumerate(frames, 1):
        img = np.asarray(read_frame(f) if not isinstance(f, np.ndarray) else f)
        if img.ndim == 3:
            img = cv2.cvtColor(img, cv2.COLOR_RGB2BGR)
        ok, buf = cv2.imencode(".png", img)
        if not ok:
            raise OSError(f"cannot encode frame {i}")
        atomic_write(directory / "img" / f"{i:04d}.png", buf.tobytes())
    atomic_write(directory / "groundtruth_rect.txt",
                 "".join(format_box(b) + "\n" for b in seq.groundtruth))
    if seq.attributes:
        atomic_write(directory / "attrs.txt", ",".join(sorted(seq.attributes)) + "\n")
    return directory


@dataclass
class SynthSpec:
    """Per-frame description of a synthetic sequence.

    ``centers`` are 0-indexed target centers, ``scales`` multiply
    ``target_size``, ``blur`` holds a box-blur radius per frame and
    ``occluders`` an OTB corner box (or None) per frame.
    """
    width: int
    height: int
    centers: list
    scales: list
    target_size: tuple = (40.0, 40.0)
    seed: int = 0
    blur: list = None
    occluders: list = None
    color: bool = True
    name: str = "synth"
    attributes: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        n = len(self.centers)
        if len(self.scales) != n:
            raise ConfigError("centers and scales must have equal length")
        self.blur = list(self.blur) if self.blur is not None else [0] * n
        self.occluders = list(self.occluders) if self.occluders is not None else [None] * n
        if len(self.blur) != n or len(self.occluders) != n:
            raise ConfigError("corruption schedules must have one entry per frame")
        for j, box in enumerate(self.boxes()):
            if _inside_fraction(box, self.width, self.height) < 0.5:
                raise SpecOutOfFrame(f"frame {j}: less than half of the target is visible")

    def __len__(self):
        return len(self.centers)

    def boxes(self):
        tw, th = self.target_size
        return [Rect(cx, cy, tw * s, th * s) for (cx, cy), s in zip(self.centers, self.scales)]

    @classmethod
    def build(cls, frames, width=480, height=360, start=None, velocity=(0.0, 0.0),
              target_size=(40.0, 40.0), scale_rate=1.0, blur_radius=0,
              blur_frames=None, occluder=None, occlusion_frames=None, **kw):
        """Constant-velocity, geometric-scale trajectory with optional corruptions.

        Frame ``j`` (0-based) has center ``start + j * velocity`` and scale
        ``scale_rate ** j``. Corruptions apply on the inclusive, 0-based frame
        ranges ``blur_frames`` and ``occlusion_frames`` (whole sequence if None).
        """
        if start is None:
            start = ((width - 1) / 2, (height - 1) / 2)
        centers = [(start[0] + j * velocity[0], start[1] + j * velocity[1])
                   for j in range(frames)]
        scales = [scale_rate ** j for j in range(frames)]

        def active(rng, j):
            return rng is None or rng[0] <= j <= rng[1]

        blur = [blur_radius if active(blur_frames, j) else 0 for j in range(frames)]
        occ = [tuple(occluder) if occluder is not None and active(occlusion_frames, j) else None
               for j in range(frames)]
        return cls(width, height, centers, scales, tuple(target_size), blur=blur,
                   occluders=occ, **kw)


def _inside_fraction(box, width, height):
    left, right = box.cx - box.w / 2, box.cx + box.w / 2
    top, bottom = box.cy - box.h / 2, box.cy + box.h / 2
    ix = max(0.0, min(right, width - 0.5) - max(left, -0.5))
    iy = max(0.0, min(bottom, height - 0.5) - max(top, -0.5))
    return ix * iy / (box.w * box.h)


def _parse_range(text):
    a, b = re.split(r"\s*[-:,]\s*", text.strip())
    return int(a), int(b)


def _parse_pair(text):
    vals = [float(v) for v in re.split(r"[,\s]+", text.strip()) if v]
    if len(vals) != 2:
        raise ConfigError(f"expected two numbers, got {text!r}")
    return tuple(vals)


_SPEC_KEYS = {
    "name": str, "frames": int, "width": int, "height": int, "seed": int,
    "start": _parse_pair, "velocity": _parse_pair, "target_size": _parse_pair,
    "scale_rate": float, "blur_radius": int, "blur_frames": _parse_range,
    "occluder": lambda t: tuple(float(v) for v in re.split(r"[,\s]+", t.strip()) if v),
    "occlusion_frames": _parse_range,
    "color": lambda t: t.strip().lower() in ("1", "true", "yes", "on"),
    "attributes": lambda t: frozenset(a.strip().upper() for a in t.split(",") if a.strip()),
}


def synth_spec_from_file(path):
    """Read a ``key = value`` synthetic spec (keys as in ``SynthSpec.build``)."""
    values = read_keyvalue(path)
    kw = {}
    for key, text in values.items():
        if key not in _SPEC_KEYS:
            raise ConfigError(f"unknown synth spec key {key!r}")
        try:
            kw[key] = _SPEC_KEYS[key](text)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {text!r} ({exc})") from None
    if "frames" not in kw:
        raise ConfigError("synth spec needs 'frames'")
    kw.setdefault("name", Path(path).stem)
    return SynthSpec.build(kw.pop("frames"), **kw)


def _noise(rng, shape, sigma, lo, hi):
    img = gaussian_filter(rng.standard_normal(shape), sigma=(sigma, sigma, 0))
    img -= img.min()
    img /= img.max()
    return lo + (hi - lo) * img


def _textures(spec):
    rng = np.random.default_rng(spec.seed)
    background = _noise(rng, (spec.height, spec.width, 3), 4.0, 60.0, 190.0)
    target = _noise(rng, (64, 64, 3), 1.5, 0.0, 255.0)
    return background, target


def _coverage(lo, hi, n):
    """Fraction of each pixel ``[p - 0.5, p + 0.5]`` covered by ``[lo, hi]``."""
    p = np.arange(n)
    return np.clip(np.minimum(p + 0.5, hi) - np.maximum(p - 0.5, lo), 0.0, 1.0)


def render_frame(spec, j, background=None, texture=None):
    """Render frame ``j`` of ``spec`` as a float RGB image in [0, 255].

    The target texture is bilinearly stretched over the exact box; border
    pixels blend target and background by their covered area.
    """
    if background is None or texture is None:
        bg, tex = _textures(spec)
        background = bg if background is None else background
        texture = tex if texture is None else texture
    box = spec.boxes()[j]
    left, top = box.cx - box.w / 2, box.cy - box.h / 2
    ax = _coverage(left, left + box.w, spec.width)
    ay = _coverage(top, top + box.h, spec.height)
    th, tw = texture.shape[:2]
    xs = (np.arange(spec.width) - left) / box.w * tw - 0.5
    ys = (np.arange(spec.height) - top) / box.h * th - 0.5
    tex = sample_grid(texture, ys, xs)
    alpha = (ay[:, None] * ax[None, :])[:, :, None]
    frame = alpha * tex + (1 - alpha) * background

    occ = spec.occluders[j]
    if occ is not None:
        r = Rect.from_corner(*occ)
        ox = _coverage(r.cx - r.w / 2, r.cx + r.w / 2, spec.width)
        oy = _coverage(r.cy - r.h / 2, r.cy + r.h / 2, spec.height)
        beta = (oy[:, None] * ox[None, :])[:, :, None]
        frame = beta * 128.0 + (1 - beta) * frame
    radius = spec.blur[j]
    if radius > 0:
        frame = uniform_filter(frame, size=(2 * radius + 1, 2 * radius + 1, 1), mode="nearest")
    return frame


def synth_sequence(spec):
    """Materialize ``spec``: returns a Sequence whose frames are uint8 arrays."""
    background, texture = _textures(spec)
    frames = []
    for j in range(len(spec)):
        img = np.rint(render_frame(spec, j, background, texture)).clip(0, 255).astype(np.uint8)
        if not spec.color:
            img = np.rint(img @ np.array([0.299, 0.587, 0.114])).clip(0, 255).astype(np.uint8)
        frames.append(img)
    gt = [b.to_corner() for b in spec.boxes()]
    return Sequence(spec.name, frames, gt, frozenset(spec.attributes))
