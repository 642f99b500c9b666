"""Seeded image-degradation operators.

Each step kind maps a uint8 image to a uint8 image of identical shape:
resizing degrades by down-then-up, grayscale replicates luma into all
channels. All float results go through a single rounding rule (half away
from zero, then clamp), so outputs are bit-exact across runs and platforms.
Stochastic kinds draw from the ``RngStream`` passed by the caller and from
nothing else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from PIL import Image, ImageDraw, ImageFont
from scipy.ndimage import convolve1d

from ..image import ImageBuffer, jpeg_roundtrip, round_half_away, to_samples
from ..rng import RngStream


class InvalidParameterError(ValueError):
    """A step parameter is missing, malformed, or outside its legal range."""


class PlacementImpossibleError(RuntimeError):
    """No placement exists for a text distractor given its exclusion box."""


_RESAMPLE = {
    "nearest": Image.Resampling.NEAREST,
    "bilinear": Image.Resampling.BILINEAR,
    "bicubic": Image.Resampling.BICUBIC,
}


@dataclass(frozen=True)
class _Float:
    lo: float
    hi: float
    lo_open: bool = False


@dataclass(frozen=True)
class _Int:
    lo: int
    hi: int


@dataclass(frozen=True)
class _Choice:
    options: tuple[str, ...]


# Global legal parameter ranges per kind. Profiles may narrow these but
# never widen them.
PARAM_SPECS: dict[str, dict[str, Any]] = {
    "gaussian_noise": {"sigma": _Float(0.0, 80.0)},
    "poisson_noise": {"scale": _Float(0.0, 1000.0, lo_open=True)},
    "speckle_noise": {"sigma": _Float(0.0, 1.0)},
    "salt_pepper": {"p": _Float(0.0, 1.0)},
    "jpeg": {"quality": _Int(1, 100)},
    "gaussian_blur": {"sigma": _Float(0.0, 16.0)},
    "resize": {"factor": _Float(0.0, 1.0, lo_open=True), "interp": _Choice(("nearest", "bilinear", "bicubic"))},
    "color_contrast": {"brightness": _Float(-64.0, 64.0), "contrast": _Float(0.5, 1.5)},
    "grayscale": {},
    "pixelate": {"block": _Int(1, 256)},
    "self_overlay": {"scale": _Float(2.0, 4.0), "alpha": _Float(0.0, 0.33)},
    "text_distractor": {},
}

KINDS = tuple(PARAM_SPECS)

# Optional parameters validated by hand in _validate_params.
_OPTIONAL: dict[str, tuple[str, ...]] = {
    "self_overlay": ("offset_x", "offset_y"),
    "text_distractor": ("text", "position", "exclusion_box", "color"),
}


def _as_box(value: Any, name: str) -> list[int]:
    try:
        box = [int(v) for v in value]
    except (TypeError, ValueError):
        raise InvalidParameterError(f"{name} must be four integers x0,y0,x1,y1") from None
    if len(box) != 4 or box[0] >= box[2] or box[1] >= box[3] or min(box) < 0:
        raise InvalidParameterError(f"{name} must be a nonempty pixel rectangle, got {box}")
    return box


def _validate_params(kind: str, params: Mapping[str, Any]) -> dict[str, Any]:
    if kind not in PARAM_SPECS:
        raise InvalidParameterError(f"unknown degradation kind {kind!r}")
    spec = PARAM_SPECS[kind]
    allowed = set(spec) | set(_OPTIONAL.get(kind, ()))
    extra = set(params) - allowed
    if extra:
        raise InvalidParameterError(f"{kind}: unexpected parameters {sorted(extra)}")
    out: dict[str, Any] = {}
    for name, rule in spec.items():
        if name not in params:
            raise InvalidParameterError(f"{kind}: missing parameter {name!r}")
        value = params[name]
        if isinstance(rule, _Float):
            value = float(value)
            if not np.isfinite(value) or value < rule.lo or value > rule.hi or (rule.lo_open and value == rule.lo):
                raise InvalidParameterError(f"{kind}.{name}={value} outside [{rule.lo}, {rule.hi}]")
        elif isinstance(rule, _Int):
            if float(value) != int(value):
                raise InvalidParameterError(f"{kind}.{name} must be an integer, got {value!r}")
            value = int(value)
            if value < rule.lo or value > rule.hi:
                raise InvalidParameterError(f"{kind}.{name}={value} outside [{rule.lo}, {rule.hi}]")
        elif isinstance(rule, _Choice):
            if value not in rule.options:
                raise InvalidParameterError(f"{kind}.{name}={value!r} not one of {rule.options}")
        out[name] = value

    if kind == "self_overlay":
        for name in ("offset_x", "offset_y"):
            if name in params and params[name] is not None:
                v = params[name]
                if float(v) != int(v) or int(v) < 0:
                    raise InvalidParameterError(f"self_overlay.{name} must be a nonnegative integer")
                out[name] = int(v)
    elif kind == "text_distractor":
        text = params.get("text", "")
        if not isinstance(text, str) or not text:
            raise InvalidParameterError("text_distractor.text must be a nonempty string")
        out["text"] = text
        if params.get("position") is not None:
            pos = params["position"]
            try:
                pos = [int(v) for v in pos]
            except (TypeError, ValueError):
                raise InvalidParameterError("text_distractor.position must be two integers") from None
            if len(pos) != 2 or min(pos) < 0:
                raise InvalidParameterError(f"text_distractor.position must be nonnegative x,y, got {pos}")
            out["position"] = pos
        if params.get("exclusion_box") is not None:
            out["exclusion_box"] = _as_box(params["exclusion_box"], "text_distractor.exclusion_box")
        if params.get("color") is not None:
            color = params["color"]
            try:
                color = [int(v) for v in color]
            except (TypeError, ValueError):
                raise InvalidParameterError("text_distractor.color must be three integers") from None
            if len(color) != 3 or min(color) < 0 or max(color) > 255:
                raise InvalidParameterError(f"text_distractor.color must be r,g,b in [0,255], got {color}")
            out["color"] = color
    return out


@dataclass(frozen=True)
class DegradationStep:
    """One concrete degradation: a kind plus fully resolved parameters."""

    kind: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", _validate_params(self.kind, self.params))


# Convenience constructors, one per kind.


def gaussian_noise(sigma: float) -> DegradationStep:
    return DegradationStep("gaussian_noise", {"sigma": sigma})


def poisson_noise(scale: float) -> DegradationStep:
    return DegradationStep("poisson_noise", {"scale": scale})


def speckle_noise(sigma: float) -> DegradationStep:
    return DegradationStep("speckle_noise", {"sigma": sigma})


def salt_pepper(p: float) -> DegradationStep:
    return DegradationStep("salt_pepper", {"p": p})


def jpeg(quality: int) -> DegradationStep:
    return DegradationStep("jpeg", {"quality": quality})


def gaussian_blur(sigma: float) -> DegradationStep:
    return DegradationStep("gaussian_blur", {"sigma": sigma})


def resize(factor: float, interp: str = "bilinear") -> DegradationStep:
    return DegradationStep("resize", {"factor": factor, "interp": interp})


def color_contrast(brightness: float, contrast: float) -> DegradationStep:
    return DegradationStep("color_contrast", {"brightness": brightness, "contrast": contrast})


def grayscale() -> DegradationStep:
    return DegradationStep("grayscale", {})


def pixelate(block: int) -> DegradationStep:
    return DegradationStep("pixelate", {"block": block})


def self_overlay(scale: float, alpha: float, offset: tuple[int, int] | None = None) -> DegradationStep:
    params: dict[str, Any] = {"scale": scale, "alpha": alpha}
    if offset is not None:
        params["offset_x"], params["offset_y"] = offset
    return DegradationStep("self_overlay", params)


def text_distractor(
    text: str,
    position: tuple[int, int] | None = None,
    exclusion_box: tuple[int, int, int, int] | None = None,
    color: tuple[int, int, int] | None = None,
) -> DegradationStep:
    params: dict[str, Any] = {"text": text}
    if position is not None:
        params["position"] = list(position)
    if exclusion_box is not None:
        params["exclusion_box"] = list(exclusion_box)
    if color is not None:
        params["color"] = list(color)
    return DegradationStep("text_distractor", params)


def apply_step(img: ImageBuffer, step: DegradationStep, rng: RngStream) -> ImageBuffer:
    """Apply one degradation step; shape and channel count are preserved."""
    return _APPLIERS[step.kind](img, step.params, rng)


def _apply_gaussian_noise(img: ImageBuffer, params: Mapping[str, Any], rng: RngStream) -> ImageBuffer:
    sigma = params["sigma"]
    if sigma == 0.0:
        return img
    noise = rng.generator().normal(0.0, sigma, img.pixels.shape)
    return ImageBuffer(to_samples(img.pixels.astype(np.float64) + noise))


def _apply_poisson_noise(img: ImageBuffer, params: Mapping[str, Any], rng: RngStream) -> ImageBuffer:
    scale = params["scale"]
    lam = img.pixels.astype(np.float64) * scale
    counts = rng.generator().poisson(lam).astype(np.float64)
    return ImageBuffer(to_samples(counts / scale))


def _apply_speckle_noise(img: ImageBuffer, params: Mapping[str, Any], rng: RngStream) -> ImageBuffer:
    sigma = params["sigma"]
    if sigma == 0.0:
        return img
    x = img.pixels.astype(np.float64)
    noise = rng.generator().normal(0.0, sigma, x.shape)
    return ImageBuffer(to_samples(x * (1.0 + noise)))


def _apply_salt_pepper(img: ImageBuffer, params: Mapping[str, Any], rng: RngStream) -> ImageBuffer:
    p = params["p"]
    if p == 0.0:
        return img
    h, w, _ = img.pixels.shape
    gen = rng.generator()
    hit = gen.random((h, w)) < p
    # all channels of a hit pixel are replaced jointly by 0 or 255
    value = np.where(gen.random((h, w)) < 0.5, 0, 255).astype(np.uint8)
    out = img.pixels.copy()
    out[hit, :] = value[hit, np.newaxis]
    return ImageBuffer(out)


def _apply_jpeg(img: ImageBuffer, params: Mapping[str, Any], rng: RngStream) -> ImageBuffer:
    return jpeg_roundtrip(img, params["quality"])


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian kernel of radius ceil(3*sigma)."""
    radius = int(np.ceil(3.0 * sigma))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return kernel / kernel.sum()


def _apply_gaussian_blur(img: ImageBuffer, params: Mapping[str, Any], rng: RngStream) -> ImageBuffer:
    sigma = params["sigma"]
    if sigma == 0.0:
        return img
    kernel = gaussian_kernel(sigma)
    x = img.pixels.astype(np.float64)
    # separable convolution with edge-clamp padding
    x = convolve1d(x, kernel, axis=0, mode="nearest")
    x = convolve1d(x, kernel, axis=1, mode="nearest")
    return ImageBuffer(to_samples(x))


def _apply_resize(img: ImageBuffer, params: Mapping[str, Any], rng: RngStream) -> ImageBuffer:
    factor = params["factor"]
    if factor == 1.0:
        return img
    resample = _RESAMPLE[params["interp"]]
    w, h = img.width, img.height
    tw = max(1, int(round_half_away(w * factor)))
    th = max(1, int(round_half_away(h * factor)))
    down = img.to_pil().resize((tw, th), resample)
    up = down.resize((w, h), resample)
    return ImageBuffer.from_pil(up)


def _apply_color_contrast(img: ImageBuffer, params: Mapping[str, Any], rng: RngStream) -> ImageBuffer:
    brightness, contrast = params["brightness"], params["contrast"]
    if brightness == 0.0 and contrast == 1.0:
        return img
    x = img.pixels.astype(np.float64)
    return ImageBuffer(to_samples(contrast * (x - 128.0) + 128.0 + brightness))


_LUMA = (0.299, 0.587, 0.114)


def _apply_grayscale(img: ImageBuffer, params: Mapping[str, Any], rng: RngStream) -> ImageBuffer:
    if img.channels == 1:
        return img
    x = img.pixels.astype(np.float64)
    luma = _LUMA[0] * x[:, :, 0] + _LUMA[1] * x[:, :, 1] + _LUMA[2] * x[:, :, 2]
    y = to_samples(luma)
    return ImageBuffer(np.repeat(y[:, :, np.newaxis], 3, axis=2))


def _apply_pixelate(img: ImageBuffer, params: Mapping[str, Any], rng: RngStream) -> ImageBuffer:
    block = params["block"]
    if block == 1:
        return img
    h, w, _ = img.pixels.shape
    ys = np.arange(0, h, block)
    xs = np.arange(0, w, block)
    x = img.pixels.astype(np.float64)
    sums = np.add.reduceat(np.add.reduceat(x, ys, axis=0), xs, axis=1)
    tile_h = np.diff(np.append(ys, h))
    tile_w = np.diff(np.append(xs, w))
    means = sums / np.outer(tile_h, tile_w)[:, :, np.newaxis]
    out = np.repeat(np.repeat(means, tile_h, axis=0), tile_w, axis=1)
    return ImageBuffer(to_samples(out))


def _apply_self_overlay(img: ImageBuffer, params: Mapping[str, Any], rng: RngStream) -> ImageBuffer:
    alpha = params["alpha"]
    if alpha == 0.0:
        return img
    scale = params["scale"]
    w, h = img.width, img.height
    ew = int(round_half_away(w * scale))
    eh = int(round_half_away(h * scale))
    enlarged = img.to_pil().resize((ew, eh), Image.Resampling.BILINEAR)
    max_ox, max_oy = ew - w, eh - h
    ox, oy = params.get("offset_x"), params.get("offset_y")
    if ox is None or oy is None:
        gen = rng.generator()
        ox = int(gen.integers(0, max_ox + 1))
        oy = int(gen.integers(0, max_oy + 1))
    else:
        ox = min(ox, max_ox)
        oy = min(oy, max_oy)
    overlay = np.asarray(enlarged.crop((ox, oy, ox + w, oy + h)), dtype=np.float64)
    if overlay.ndim == 2:
        overlay = overlay[:, :, np.newaxis]
    base = img.pixels.astype(np.float64)
    return ImageBuffer(to_samples((1.0 - alpha) * base + alpha * overlay))


def _text_extent(pil: Image.Image, text: str, font: ImageFont.ImageFont) -> tuple[int, int, int, int]:
    left, top, right, bottom = ImageDraw.Draw(pil).textbbox((0, 0), text, font=font)
    return left, top, right - left, bottom - top


def _apply_text_distractor(img: ImageBuffer, params: Mapping[str, Any], rng: RngStream) -> ImageBuffer:
    text = params["text"]
    box = params.get("exclusion_box")
    pil = img.to_pil()
    font = ImageFont.load_default()
    ink_l, ink_t, tw, th = _text_extent(pil, text, font)
    w, h = img.width, img.height
    if tw > w or th > h:
        raise PlacementImpossibleError(f"text {text!r} ({tw}x{th}) does not fit in a {w}x{h} image")

    if box is None:
        fits = True
    else:
        bx0, by0, bx1, by1 = box
        # feasible iff the ink box fits fully above, below, left, or right of
        # the exclusion box
        fits = (th <= by0) or (by1 + th <= h) or (tw <= bx0) or (bx1 + tw <= w)
    if not fits:
        raise PlacementImpossibleError(f"exclusion box {box} leaves no room for text {text!r} in {w}x{h}")

    def intersects(x: int, y: int) -> bool:
        if box is None:
            return False
        bx0, by0, bx1, by1 = box
        return x < bx1 and x + tw > bx0 and y < by1 and y + th > by0

    gen: np.random.Generator | None = None
    color = params.get("color")
    if color is None:
        gen = rng.generator()
        color = [int(v) for v in gen.integers(0, 256, size=3)]

    if params.get("position") is not None:
        x, y = params["position"]
        if x + tw > w or y + th > h:
            raise InvalidParameterError(f"text position ({x},{y}) puts {tw}x{th} text outside the {w}x{h} image")
        if intersects(x, y):
            raise PlacementImpossibleError(f"text position ({x},{y}) intersects exclusion box {box}")
    else:
        if gen is None:
            gen = rng.generator()
        x = y = 0
        placed = False
        for _ in range(128):
            x = int(gen.integers(0, w - tw + 1))
            y = int(gen.integers(0, h - th + 1))
            if not intersects(x, y):
                placed = True
                break
        if not placed:
            # deterministic fallback: first corner of the feasible side
            bx0, by0, bx1, by1 = box  # box is not None here, else any draw fits
            if th <= by0:
                x, y = 0, 0
            elif by1 + th <= h:
                x, y = 0, by1
            elif tw <= bx0:
                x, y = 0, 0
            else:
                x, y = bx1, 0

    draw = ImageDraw.Draw(pil)
    fill = tuple(color) if img.channels == 3 else int(color[0])
    draw.text((x - ink_l, y - ink_t), text, fill=fill, font=font)
    return ImageBuffer.from_pil(pil)


_APPLIERS = {
    "gaussian_noise": _apply_gaussian_noise,
    "poisson_noise": _apply_poisson_noise,
    "speckle_noise": _apply_speckle_noise,
    "salt_pepper": _apply_salt_pepper,
    "jpeg": _apply_jpeg,
    "gaussian_blur": _apply_gaussian_blur,
    "resize": _apply_resize,
    "color_contrast": _apply_color_contrast,
    "grayscale": _apply_grayscale,
    "pixelate": _apply_pixelate,
    "self_overlay": _apply_self_overlay,
    "text_distractor": _apply_text_distractor,
}
