import numpy as np
import pytest

from dfbench.image import ImageBuffer
from dfbench.rng import RngStream


@pytest.fixture
def textured_image() -> ImageBuffer:
    """Deterministic 64x48 RGB image with smooth structure plus fine noise."""
    return make_textured(height=64, width=48, seed=1234)


def make_textured(height: int, width: int, seed: int, channels: int = 3) -> ImageBuffer:
    gen = RngStream(seed, "test-texture").generator()
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    base = 96.0 + 64.0 * np.sin(xx / 9.0) * np.cos(yy / 7.0) + 0.35 * xx + 0.2 * yy
    arr = np.stack([base + 12.0 * k for k in range(channels)], axis=2)
    arr += gen.normal(0.0, 6.0, arr.shape)
    return ImageBuffer(np.clip(np.round(arr), 0, 255).astype(np.uint8))


def make_natural(height: int, width: int, seed: int) -> ImageBuffer:
    """Smooth, spatially correlated stand-in for a natural photograph."""
    from PIL import Image

    gen = RngStream(seed, "test-natural").generator()
    coarse = gen.uniform(30, 220, (height // 16, width // 16, 3))
    field = np.asarray(
        Image.fromarray(np.clip(coarse, 0, 255).astype(np.uint8)).resize(
            (width, height), Image.Resampling.BICUBIC
        ),
        dtype=np.float64,
    )
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    field += (18.0 * np.sin(xx / 23.0) + 12.0 * np.cos(yy / 31.0))[:, :, None]
    return ImageBuffer(np.clip(np.round(field), 0, 255).astype(np.uint8))


def pairwise_auc(scores, labels) -> float:
    """O(n^2) oracle: fraction of (fake, real) pairs won, ties counting half."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    fake = scores[labels == 1]
    real = scores[labels == 0]
    wins = (fake[:, None] > real[None, :]).sum() + 0.5 * (fake[:, None] == real[None, :]).sum()
    return float(wins) / (len(fake) * len(real))
