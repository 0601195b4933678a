"""Generate the shipped color-name lookup table.

Each quantized RGB bin (bin center ``8 * q + 4`` per channel) gets a softmax
over negative squared CIELAB distances to one prototype color per name. The
file layout matches ``situp.features.load_color_table``: 32768 rows x 11
float32 columns, row ``(r_q * 32 + g_q) * 32 + b_q``.

Any published RGB-to-color-name table in the same layout can replace it,
either at the default path or through ``SITUP_CN_TABLE``.

    python scripts/make_cn_table.py [--out PATH] [--temperature 20]
"""
import argparse
from pathlib import Path

import numpy as np

from situp.features import COLOR_NAMES, DEFAULT_CN_TABLE

PROTOTYPES = {
    "black": (0, 0, 0),
    "blue": (30, 60, 220),
    "brown": (130, 80, 40),
    "grey": (128, 128, 128),
    "green": (40, 160, 40),
    "orange": (250, 140, 20),
    "pink": (250, 160, 200),
    "purple": (130, 40, 160),
    "red": (210, 20, 30),
    "white": (255, 255, 255),
    "yellow": (250, 230, 30),
}


def srgb_to_lab(rgb):
    rgb = np.asarray(rgb, dtype=np.float64) / 255.0
    lin = np.where(rgb <= 0.04045, rgb / 12.92, ((rgb + 0.055) / 1.055) ** 2.4)
    m = np.array([[0.4124564, 0.3575761, 0.1804375],
                  [0.2126729, 0.7151522, 0.0721750],
                  [0.0193339, 0.1191920, 0.9503041]])
    xyz = lin @ m.T / np.array([0.95047, 1.0, 1.08883])
    f = np.where(xyz > (6 / 29) ** 3, np.cbrt(xyz), xyz / (3 * (6 / 29) ** 2) + 4 / 29)
    return np.stack([116 * f[..., 1] - 16,
                     500 * (f[..., 0] - f[..., 1]),
                     200 * (f[..., 1] - f[..., 2])], axis=-1)


def make_table(temperature):
    q = np.arange(32) * 8 + 4
    r, g, b = np.meshgrid(q, q, q, indexing="ij")
    lab = srgb_to_lab(np.stack([r, g, b], axis=-1).reshape(-1, 3))
    protos = srgb_to_lab(np.array([PROTOTYPES[n] for n in COLOR_NAMES]))
    d2 = ((lab[:, None, :] - protos[None, :, :]) ** 2).sum(axis=2)
    logits = -d2 / (2 * temperature ** 2)
    logits -= logits.max(axis=1, keepdims=True)
    p = np.exp(logits)
    return p / p.sum(axis=1, keepdims=True)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=DEFAULT_CN_TABLE)
    ap.add_argument("--temperature", type=float, default=20.0)
    args = ap.parse_args()
    table = make_table(args.temperature).astype("<f4")
    args.out.parent.mkdir(parents=True, exist_ok=True)
    table.tofile(args.out)
    print(f"wrote {args.out} {table.shape}")


if __name__ == "__main__":
    main()
