#!/usr/bin/env python3
"""Regenerates the bundled test photos in testdata/ from scikit-image's
sample data (all public-domain/CC0 photographs):

  portrait.ppm -- "astronaut" (NASA, public domain), native 512x512
  cup.ppm      -- "coffee" (CC0, Rachel Michetti), center crop + resize
  cat.ppm      -- "chelsea" (CC0, Stefan van der Walt), center crop + resize

portrait and cup are contrast-normalized to a luminance standard deviation
of about 33, matching the classic 512x512 test trio the quality thresholds
were calibrated against (cat is already in that range natively).

The PPMs are committed so the test suite has no Python dependency; run this
only to rebuild them.
"""

import os

import numpy as np
from PIL import Image
import skimage.data

OUT = os.path.join(os.path.dirname(__file__), "..", "testdata")
SIZE = 512
TARGET_LUMA_STD = 33.0


def center_square(a: np.ndarray) -> np.ndarray:
    h, w = a.shape[:2]
    s = min(h, w)
    y0 = (h - s) // 2
    x0 = (w - s) // 2
    return a[y0 : y0 + s, x0 : x0 + s]


def luma_std(a: np.ndarray) -> float:
    y = 0.299 * a[..., 0] + 0.587 * a[..., 1] + 0.114 * a[..., 2]
    return float(y.std())


def normalize_contrast(a: np.ndarray, target_std: float) -> np.ndarray:
    f = target_std / luma_std(a)
    if f >= 1.0:
        return a
    mean = a.reshape(-1, 3).mean(axis=0)
    out = mean + f * (a.astype(np.float64) - mean)
    return np.clip(np.round(out), 0, 255).astype(np.uint8)


def save_ppm(a: np.ndarray, name: str, normalize: bool) -> None:
    img = Image.fromarray(a)
    if img.size != (SIZE, SIZE):
        img = img.resize((SIZE, SIZE), Image.LANCZOS)
    a = np.asarray(img)
    if normalize:
        a = normalize_contrast(a, TARGET_LUMA_STD)
    path = os.path.join(OUT, name)
    Image.fromarray(a).save(path, format="PPM")
    print(f"wrote {path} {Image.fromarray(a).size} luma_std={luma_std(a):.1f}")


def main() -> None:
    os.makedirs(OUT, exist_ok=True)
    save_ppm(skimage.data.astronaut(), "portrait.ppm", True)
    save_ppm(center_square(skimage.data.coffee()), "cup.ppm", True)
    save_ppm(center_square(skimage.data.chelsea()), "cat.ppm", False)


if __name__ == "__main__":
    main()
