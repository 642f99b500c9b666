"""Classical forgery features from high-frequency residual statistics.

The baseline scores an image from a fixed-length vector of hand-crafted
statistics chosen to react to blend seams and local retouching while staying
cheap on CPU. Featurization is fully deterministic. Feature order is part of
the model format and must not change; see ``FEATURE_NAMES``.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from PIL import Image
from scipy.fft import dctn
from scipy.ndimage import convolve1d

RESIDUAL_SIGMA = 1.5
DCT_BLOCK = 8
DCT_HIGH_BAND = 8  # coefficients with u + v >= this count as high band
CENTER_FRACTION = 0.6
_EPS = 1e-9

FEATURE_NAMES = [
    "residual_var_r",
    "residual_var_g",
    "residual_var_b",
    "residual_var_center_r",
    "residual_var_center_g",
    "residual_var_center_b",
    "dct_high_band_energy",
    "luma_mean",
    "luma_std",
    "luma_skew",
    "luma_kurtosis",
    "laplacian_center_ratio",
    "residual_center_ratio",
    "residual_kurt_r",
    "residual_kurt_g",
    "residual_kurt_b",
    "ring_grad_contrast",
    "ring_residual_contrast",
    "channel_shift_spread",
    "inside_outside_luma_gap",
    "res_sq_diff",
    "lap_sq_diff",
    "grad_sq_diff",
]

N_FEATURES = len(FEATURE_NAMES)

# Blend seams sit on the ellipse inscribed in the conventional central-60%
# face box, so the ring features compare statistics on that ellipse against
# flanking annuli; ratios stay meaningful under global noise and contrast.
RING_SEAM = (0.92, 1.08)
RING_INNER = (0.72, 0.88)
RING_OUTER = (1.12, 1.28)
DISK_INSIDE = 0.85
SHELL_OUTSIDE = (1.15, 1.45)


def load_image(path: str | Path) -> np.ndarray:
    """Read an image as (h, w, 3) uint8; grayscale replicates into RGB."""
    with Image.open(path) as img:
        if img.mode != "RGB":
            img = img.convert("RGB")
        return np.asarray(img, dtype=np.uint8)


def gaussian_kernel(sigma: float) -> np.ndarray:
    radius = int(math.ceil(3.0 * sigma))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return kernel / kernel.sum()


def _blur(x: np.ndarray, sigma: float) -> np.ndarray:
    kernel = gaussian_kernel(sigma)
    out = convolve1d(x, kernel, axis=0, mode="nearest")
    return convolve1d(out, kernel, axis=1, mode="nearest")


def _center_slice(h: int, w: int) -> tuple[slice, slice]:
    margin = (1.0 - CENTER_FRACTION) / 2.0
    return (
        slice(int(round(h * margin)), int(round(h * (1.0 - margin)))),
        slice(int(round(w * margin)), int(round(w * (1.0 - margin)))),
    )


def _moments(values: np.ndarray) -> tuple[float, float, float, float]:
    """Mean, population std, skewness, and excess kurtosis (0 when flat)."""
    mean = float(values.mean())
    centered = values - mean
    var = float((centered**2).mean())
    std = math.sqrt(var)
    if std < _EPS:
        return mean, std, 0.0, 0.0
    skew = float((centered**3).mean()) / std**3
    kurt = float((centered**4).mean()) / var**2 - 3.0
    return mean, std, skew, kurt


def _laplacian(y: np.ndarray) -> np.ndarray:
    padded = np.pad(y, 1, mode="edge")
    return (
        4.0 * y
        - padded[:-2, 1:-1]
        - padded[2:, 1:-1]
        - padded[1:-1, :-2]
        - padded[1:-1, 2:]
    )


def _ellipse_radius(h: int, w: int) -> np.ndarray:
    """Normalized radius relative to the ellipse inscribed in the face box."""
    ys, xs = _center_slice(h, w)
    cx, cy = (xs.start + xs.stop) / 2.0, (ys.start + ys.stop) / 2.0
    ax, ay = max((xs.stop - xs.start) / 2.0, 1.0), max((ys.stop - ys.start) / 2.0, 1.0)
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    return np.sqrt(((xx - cx) / ax) ** 2 + ((yy - cy) / ay) ** 2)


def _grad_magnitude(y: np.ndarray) -> np.ndarray:
    padded = np.pad(y, 1, mode="edge")
    gx = padded[1:-1, 2:] - padded[1:-1, :-2]
    gy = padded[2:, 1:-1] - padded[:-2, 1:-1]
    return np.abs(gx) + np.abs(gy)


def _grad_sq(y: np.ndarray) -> np.ndarray:
    padded = np.pad(y, 1, mode="edge")
    gx = padded[1:-1, 2:] - padded[1:-1, :-2]
    gy = padded[2:, 1:-1] - padded[:-2, 1:-1]
    return gx * gx + gy * gy


def _band_mean(values: np.ndarray, radius: np.ndarray, band: tuple[float, float]) -> float:
    mask = (radius >= band[0]) & (radius <= band[1])
    if not mask.any():
        return 0.0
    return float(values[mask].mean())


def _ring_features(y: np.ndarray, res_luma: np.ndarray, x: np.ndarray) -> list[float]:
    h, w = y.shape
    radius = _ellipse_radius(h, w)
    grad = _grad_magnitude(y)
    flank_grad = 0.5 * (_band_mean(grad, radius, RING_INNER) + _band_mean(grad, radius, RING_OUTER))
    grad_contrast = _band_mean(grad, radius, RING_SEAM) / (flank_grad + _EPS)
    flank_res = 0.5 * (_band_mean(res_luma, radius, RING_INNER) + _band_mean(res_luma, radius, RING_OUTER))
    res_contrast = _band_mean(res_luma, radius, RING_SEAM) / (flank_res + _EPS)

    inside = radius <= DISK_INSIDE
    outside = (radius >= SHELL_OUTSIDE[0]) & (radius <= SHELL_OUTSIDE[1])
    if not inside.any() or not outside.any():
        return [grad_contrast, res_contrast, 0.0, 0.0]
    diffs = [float(x[:, :, k][inside].mean() - x[:, :, k][outside].mean()) for k in range(3)]
    spread = float(np.std(diffs))
    luma_gap = abs(0.299 * diffs[0] + 0.587 * diffs[1] + 0.114 * diffs[2])
    return [grad_contrast, res_contrast, spread, luma_gap]


def _dct_high_band(y: np.ndarray) -> float:
    h, w = y.shape
    bh, bw = h // DCT_BLOCK, w // DCT_BLOCK
    if bh == 0 or bw == 0:
        return 0.0
    u = np.arange(DCT_BLOCK)
    high = (u[:, None] + u[None, :]) >= DCT_HIGH_BAND
    total = 0.0
    for by in range(bh):
        for bx in range(bw):
            block = y[by * DCT_BLOCK : (by + 1) * DCT_BLOCK, bx * DCT_BLOCK : (bx + 1) * DCT_BLOCK]
            coefs = dctn(block, type=2, norm="ortho")
            total += float(np.abs(coefs[high]).mean())
    return total / (bh * bw)


def featurize(image: np.ndarray) -> np.ndarray:
    """Fixed-order feature vector for one (h, w, 3) uint8 image."""
    if image.ndim != 3 or image.shape[2] != 3 or image.dtype != np.uint8:
        raise ValueError(f"expected (h, w, 3) uint8, got {image.shape} {image.dtype}")
    x = image.astype(np.float64)
    h, w, _ = x.shape
    center = _center_slice(h, w)
    border_mask = np.ones((h, w), dtype=bool)
    border_mask[center] = False

    residual = x - _blur(x, RESIDUAL_SIGMA)
    residual_var = [float(residual[:, :, k].var()) for k in range(3)]
    residual_var_center = [float(residual[center[0], center[1], k].var()) for k in range(3)]

    y = 0.299 * x[:, :, 0] + 0.587 * x[:, :, 1] + 0.114 * x[:, :, 2]
    dct_energy = _dct_high_band(y)
    luma_mean, luma_std, luma_skew, luma_kurt = _moments(y)

    lap = np.abs(_laplacian(y))
    lap_ratio = float(lap[center].mean()) / (float(lap[border_mask].mean()) + _EPS)

    res_luma = np.abs(0.299 * residual[:, :, 0] + 0.587 * residual[:, :, 1] + 0.114 * residual[:, :, 2])
    res_ratio = float(res_luma[center].mean()) / (float(res_luma[border_mask].mean()) + _EPS)

    residual_kurt = [_moments(residual[:, :, k])[3] for k in range(3)]
    ring = _ring_features(y, res_luma, x)

    # center-minus-border mean-square energies: iid noise adds the same
    # energy everywhere, so these differences cancel it while keeping the
    # interior-smoothing signature of a blended face region
    res_y = y - _blur(y, RESIDUAL_SIGMA)
    res_sq = res_y * res_y
    lap_signed = _laplacian(y)
    lap_sq = lap_signed * lap_signed
    grad_sq = _grad_sq(y)
    diffs = [
        float(res_sq[center].mean() - res_sq[border_mask].mean()),
        float(lap_sq[center].mean() - lap_sq[border_mask].mean()),
        float(grad_sq[center].mean() - grad_sq[border_mask].mean()),
    ]

    return np.array(
        residual_var
        + residual_var_center
        + [dct_energy, luma_mean, luma_std, luma_skew, luma_kurt, lap_ratio, res_ratio]
        + residual_kurt
        + ring
        + diffs,
        dtype=np.float64,
    )


def featurize_file(path: str | Path) -> np.ndarray:
    return featurize(load_image(path))
