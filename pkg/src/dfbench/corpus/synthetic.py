"""Synthetic stand-in source images for desk-scale runs.

Real challenge corpora start from face crops; for self-contained demos and
tests this generates deterministic face-like images: a smooth background,
an elliptical skin-tone region with simple features, and mild sensor noise.
They are not faces, but they give the pseudo-fake blender and classical
detectors realistic structure to work with.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from ..image import ImageBuffer
from ..rng import RngStream


def synthetic_real(seed: int, index: int, size: int = 256) -> ImageBuffer:
    gen = RngStream(seed, f"synthetic-real/{index}").generator()
    coarse = gen.uniform(40, 200, (8, 8, 3))
    background = np.asarray(
        Image.fromarray(coarse.astype(np.uint8)).resize((size, size), Image.Resampling.BICUBIC),
        dtype=np.float64,
    )

    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    cx = size / 2 + gen.uniform(-0.06, 0.06) * size
    cy = size / 2 + gen.uniform(-0.06, 0.06) * size
    ax = gen.uniform(0.26, 0.34) * size
    ay = gen.uniform(0.32, 0.42) * size
    head = (((xx - cx) / ax) ** 2 + ((yy - cy) / ay) ** 2) <= 1.0

    tone = np.array(
        [gen.uniform(150, 230), gen.uniform(110, 180), gen.uniform(90, 160)], dtype=np.float64
    )
    shading = 1.0 - 0.25 * ((xx - cx) / (ax + 1e-9)) ** 2
    out = background
    out[head] = tone[np.newaxis, :] * shading[head][:, np.newaxis]

    # simple features: two eyes and a mouth line, darker than skin
    for side in (-1.0, 1.0):
        ex, ey = cx + side * 0.38 * ax, cy - 0.25 * ay
        er = max(2.0, 0.09 * ax)
        eye = ((xx - ex) ** 2 + (yy - ey) ** 2) <= er**2
        out[eye] *= 0.35
    mouth = (np.abs(yy - (cy + 0.45 * ay)) <= max(1.0, 0.035 * ay)) & (np.abs(xx - cx) <= 0.4 * ax)
    out[mouth] *= 0.55

    out += gen.normal(0.0, 3.0, out.shape)
    return ImageBuffer(np.clip(np.round(out), 0, 255).astype(np.uint8))


def make_synthetic_reals(out_dir: str | Path, count: int, seed: int, size: int = 256) -> list[Path]:
    """Write ``count`` deterministic source images as PNGs; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for index in range(count):
        path = out_dir / f"real-{index:05d}.png"
        synthetic_real(seed, index, size).save(path)
        paths.append(path)
    return paths
