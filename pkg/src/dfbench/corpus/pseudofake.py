"""Pseudo-fake synthesis by self-blending.

A forgery stand-in: a geometrically perturbed, color-shifted copy of a real
image is alpha-blended back into the original under a soft elliptical mask
centered on the face box. The result carries blend seams and local
statistics shifts without any generative model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve1d

from ..degrade.steps import gaussian_kernel
from ..image import ImageBuffer, to_samples
from ..rng import RngStream


class DegenerateMaskError(RuntimeError):
    """The sampled composite is indistinguishable from its source; resample."""


@dataclass(frozen=True)
class PseudoFakeParams:
    """Strengths of the self-blend perturbations.

    ``warp_magnitude`` is a fraction of image width bounding translation,
    rotation (radians) and scale jitter; ``color_shift`` bounds the additive
    per-channel shift in sample units; ``blend_alpha_range`` is the uniform
    range the blend opacity is drawn from.
    """

    mask_softness: float = 6.0
    warp_magnitude: float = 0.04
    color_shift: float = 22.0
    blend_alpha_range: tuple[float, float] = (0.5, 1.0)

    def __post_init__(self) -> None:
        if not 0.0 < self.warp_magnitude <= 0.1:
            raise ValueError(f"warp_magnitude must lie in (0, 0.1], got {self.warp_magnitude}")
        lo, hi = self.blend_alpha_range
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError(f"blend_alpha_range must satisfy 0 <= lo <= hi <= 1, got {self.blend_alpha_range}")
        if self.mask_softness < 0.0:
            raise ValueError("mask_softness must be >= 0")
        if self.color_shift < 0.0:
            raise ValueError("color_shift must be >= 0")


def default_face_box(width: int, height: int) -> tuple[int, int, int, int]:
    """Central 60% rectangle, the stand-in when no face box is supplied."""
    return (
        int(round(width * 0.2)),
        int(round(height * 0.2)),
        int(round(width * 0.8)),
        int(round(height * 0.8)),
    )


def _elliptical_mask(height: int, width: int, box: tuple[int, int, int, int], softness: float) -> np.ndarray:
    x0, y0, x1, y1 = box
    cx, cy = (x0 + x1) / 2.0, (y0 + y1) / 2.0
    ax, ay = max((x1 - x0) / 2.0, 1.0), max((y1 - y0) / 2.0, 1.0)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    mask = (((xx - cx) / ax) ** 2 + ((yy - cy) / ay) ** 2 <= 1.0).astype(np.float64)
    if mask.sum() == 0.0:
        raise DegenerateMaskError(f"elliptical mask for box {box} covers no pixels in {width}x{height}")
    if softness > 0.0:
        kernel = gaussian_kernel(softness)
        mask = convolve1d(mask, kernel, axis=0, mode="nearest")
        mask = convolve1d(mask, kernel, axis=1, mode="nearest")
    return mask


def _bilinear_sample(arr: np.ndarray, sx: np.ndarray, sy: np.ndarray) -> np.ndarray:
    """Float bilinear sampling with edge-clamped coordinates."""
    h, w = arr.shape[:2]
    sx = np.clip(sx, 0.0, w - 1.0)
    sy = np.clip(sy, 0.0, h - 1.0)
    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (sx - x0)[:, :, np.newaxis]
    fy = (sy - y0)[:, :, np.newaxis]
    top = arr[y0, x0] * (1.0 - fx) + arr[y0, x1] * fx
    bottom = arr[y1, x0] * (1.0 - fx) + arr[y1, x1] * fx
    return top * (1.0 - fy) + bottom * fy


def _warped_copy(src: ImageBuffer, gen: np.random.Generator, magnitude: float) -> np.ndarray:
    """Small random affine (shift, rotation, scale) of the whole image.

    Float arithmetic end to end: as the warp parameters vanish the output
    converges to the source exactly, so identity composites are detectable.
    """
    w, h = src.width, src.height
    dx = float(gen.uniform(-magnitude, magnitude)) * w
    dy = float(gen.uniform(-magnitude, magnitude)) * h
    angle = float(gen.uniform(-magnitude, magnitude))
    scale = 1.0 + float(gen.uniform(-magnitude, magnitude))
    cx, cy = w / 2.0, h / 2.0
    cos_t, sin_t = math.cos(-angle) / scale, math.sin(-angle) / scale
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    # inverse map: output pixel -> source pixel
    rel_x, rel_y = xx - (cx + dx), yy - (cy + dy)
    sx = cos_t * rel_x - sin_t * rel_y + cx
    sy = sin_t * rel_x + cos_t * rel_y + cy
    return _bilinear_sample(src.pixels.astype(np.float64), sx, sy)


def synth_pseudo_fake(
    src: ImageBuffer,
    params: PseudoFakeParams,
    rng: RngStream,
    face_box: tuple[int, int, int, int] | None = None,
) -> ImageBuffer:
    """Blend a perturbed copy of ``src`` back into itself under a face mask.

    Raises ``DegenerateMaskError`` when the sampled geometry leaves the
    output essentially identical to the source (fewer than 1% of pixels
    changed); callers resample with a fresh stream.
    """
    box = face_box if face_box is not None else default_face_box(src.width, src.height)
    gen = rng.generator()
    perturbed = _warped_copy(src, gen, params.warp_magnitude)
    shift = gen.uniform(-params.color_shift, params.color_shift, size=src.channels)
    perturbed = np.clip(perturbed + shift[np.newaxis, np.newaxis, :], 0.0, 255.0)
    alpha = float(gen.uniform(*params.blend_alpha_range))
    mask = _elliptical_mask(src.height, src.width, box, params.mask_softness)
    blend = alpha * mask[:, :, np.newaxis]
    base = src.pixels.astype(np.float64)
    out = to_samples(base * (1.0 - blend) + perturbed * blend)
    changed = np.any(out != src.pixels, axis=2).mean()
    if changed < 0.01:
        raise DegenerateMaskError(f"composite differs from source on only {changed:.2%} of pixels")
    return ImageBuffer(out)
