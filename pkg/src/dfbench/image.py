"""8-bit image substrate and lossless/lossy interchange.

Images are row-major, interleaved, 8-bit rasters with 1 or 3 channels,
wrapped in an immutable ``ImageBuffer``. PNG is the lossless interchange
format; baseline JPEG is available both for ingestion and as a degradation.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

MIN_SIDE = 16

_PIL_MODES = {1: "L", 3: "RGB"}


@dataclass(frozen=True)
class ImageBuffer:
    """Immutable uint8 raster of shape (height, width, channels)."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pixels)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3:
            raise ValueError(f"expected a (h, w, c) array, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            raise ValueError(f"expected uint8 samples, got {arr.dtype}")
        h, w, c = arr.shape
        if c not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {c}")
        if h < MIN_SIDE or w < MIN_SIDE:
            raise ValueError(f"image must be at least {MIN_SIDE}x{MIN_SIDE}, got {w}x{h}")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @classmethod
    def constant(cls, height: int, width: int, value: int, channels: int = 3) -> "ImageBuffer":
        return cls(np.full((height, width, channels), value, dtype=np.uint8))

    @classmethod
    def from_pil(cls, img: Image.Image) -> "ImageBuffer":
        if img.mode not in ("L", "RGB"):
            img = img.convert("RGB")
        arr = np.asarray(img, dtype=np.uint8)
        return cls(arr)

    def to_pil(self) -> Image.Image:
        if self.channels == 1:
            return Image.fromarray(self.pixels[:, :, 0], mode="L")
        return Image.fromarray(self.pixels, mode="RGB")

    @classmethod
    def load(cls, path: str | Path) -> "ImageBuffer":
        with Image.open(path) as img:
            return cls.from_pil(img)

    def save(self, path: str | Path, jpeg_quality: int = 95) -> None:
        path = Path(path)
        suffix = path.suffix.lower()
        if suffix == ".png":
            self.to_pil().save(path, format="PNG")
        elif suffix in (".jpg", ".jpeg"):
            self.to_pil().save(path, format="JPEG", quality=jpeg_quality)
        else:
            raise ValueError(f"unsupported image extension {suffix!r} (use .png or .jpg)")

    def same_as(self, other: "ImageBuffer") -> bool:
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)


def round_half_away(x: np.ndarray | float) -> np.ndarray:
    """Round to nearest integer, halves away from zero (the single rounding
    rule used for every float-to-sample conversion)."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def to_samples(x: np.ndarray) -> np.ndarray:
    """Round (half away from zero) and clamp to the legal [0, 255] range."""
    return np.clip(round_half_away(x), 0.0, 255.0).astype(np.uint8)


def jpeg_roundtrip(img: ImageBuffer, quality: int) -> ImageBuffer:
    """Baseline JPEG encode/decode round trip at the given quality factor."""
    if not 1 <= quality <= 100:
        raise ValueError(f"jpeg quality must be in [1, 100], got {quality}")
    buf = io.BytesIO()
    img.to_pil().save(buf, format="JPEG", quality=quality)
    buf.seek(0)
    with Image.open(buf) as decoded:
        out = ImageBuffer.from_pil(decoded)
    if out.channels != img.channels:
        # grayscale input decodes as L; force the original channel layout
        out = ImageBuffer(np.repeat(out.pixels, img.channels, axis=2))
    return out


def psnr(a: ImageBuffer, b: ImageBuffer) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` for identical images."""
    if a.pixels.shape != b.pixels.shape:
        raise ValueError("psnr requires images of identical shape")
    diff = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)
