#!/usr/bin/env python3
"""Build the 8-image grayscale test corpus from the photos bundled with scikit-image.

Each image is converted to 8-bit luma (ITU-R BT.601 weights), center-cropped to at
most 512x512 with both dimensions a multiple of 8, and written as binary PGM.
"""
import os
import sys

import numpy as np
import skimage.data as data
import skimage.io as io

NAMES = ["camera", "astronaut", "coffee", "chelsea", "rocket", "motorcycle_left", "coins", "moon"]


def luma(img):
    if img.ndim == 2:
        return img.astype(np.float64)
    rgb = img[..., :3].astype(np.float64)
    return 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]


def crop(img, limit=512):
    h, w = img.shape
    th = min(limit, h - h % 8)
    tw = min(limit, w - w % 8)
    y0 = (h - th) // 2
    x0 = (w - tw) // 2
    return img[y0:y0 + th, x0:x0 + tw]


def write_pgm(path, img):
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(img.astype(np.uint8).tobytes())


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/data/corpus"
    os.makedirs(out, exist_ok=True)
    for name in NAMES:
        img = io.imread(os.path.join(os.path.dirname(data.__file__), next(f for f in os.listdir(os.path.dirname(data.__file__)) if f.startswith(name + "."))))
        y = np.clip(np.round(crop(luma(img))), 0, 255)
        short = name.split("_")[0]
        write_pgm(os.path.join(out, f"{short}.pgm"), y)
        print(short, y.shape)


if __name__ == "__main__":
    main()
