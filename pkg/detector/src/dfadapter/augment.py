"""Training-time degradation augmentation for the baseline.

The harness degrades its evaluation splits more aggressively than its
training split, so the baseline trains on extra degraded copies of each
labeled image. The adapter owns this small pipeline (noise, JPEG cycling,
blur, grayscale, impulse noise, rescaling); it is deliberately independent
of the harness's degradation engine and is seeded for reproducible fits.
"""

from __future__ import annotations

import io

import numpy as np
from PIL import Image, ImageFilter


def _to_uint8(x: np.ndarray) -> np.ndarray:
    return np.clip(np.round(x), 0, 255).astype(np.uint8)


def _jpeg_cycle(img: np.ndarray, quality: int) -> np.ndarray:
    buf = io.BytesIO()
    Image.fromarray(img).save(buf, format="JPEG", quality=quality)
    buf.seek(0)
    with Image.open(buf) as decoded:
        return np.asarray(decoded.convert("RGB"), dtype=np.uint8)


def augment_once(image: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    """One or two random degradations applied to a training image."""
    x = image
    for _ in range(int(gen.integers(1, 3))):
        kind = int(gen.integers(0, 6))
        if kind == 0:
            x = _to_uint8(x.astype(np.float64) + gen.normal(0.0, float(gen.uniform(5.0, 50.0)), x.shape))
        elif kind == 1:
            x = _jpeg_cycle(x, int(gen.integers(25, 95)))
        elif kind == 2:
            pil = Image.fromarray(x).filter(ImageFilter.GaussianBlur(float(gen.uniform(0.5, 3.5))))
            x = np.asarray(pil, dtype=np.uint8)
        elif kind == 3:
            y = 0.299 * x[:, :, 0] + 0.587 * x[:, :, 1] + 0.114 * x[:, :, 2]
            x = np.repeat(_to_uint8(y)[:, :, np.newaxis], 3, axis=2)
        elif kind == 4:
            h, w = x.shape[:2]
            hit = gen.random((h, w)) < float(gen.uniform(0.005, 0.05))
            value = np.where(gen.random((h, w)) < 0.5, 0, 255).astype(np.uint8)
            x = x.copy()
            x[hit, :] = value[hit, np.newaxis]
        else:
            h, w = x.shape[:2]
            factor = float(gen.uniform(0.25, 1.0))
            pil = Image.fromarray(x)
            small = pil.resize((max(1, int(w * factor)), max(1, int(h * factor))), Image.Resampling.BILINEAR)
            x = np.asarray(small.resize((w, h), Image.Resampling.BILINEAR), dtype=np.uint8)
    return x


def augmented_copies(image: np.ndarray, count: int, gen: np.random.Generator) -> list[np.ndarray]:
    return [augment_once(image, gen) for _ in range(count)]
