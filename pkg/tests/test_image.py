import math

import numpy as np
import pytest

from dfbench.image import ImageBuffer, jpeg_roundtrip, psnr, round_half_away, to_samples

from conftest import make_natural, make_textured


class TestImageBuffer:
    def test_rejects_tiny_images(self):
        with pytest.raises(ValueError):
            ImageBuffer(np.zeros((15, 40, 3), np.uint8))
        with pytest.raises(ValueError):
            ImageBuffer(np.zeros((40, 15, 3), np.uint8))

    def test_rejects_bad_channel_counts_and_dtypes(self):
        with pytest.raises(ValueError):
            ImageBuffer(np.zeros((32, 32, 2), np.uint8))
        with pytest.raises(ValueError):
            ImageBuffer(np.zeros((32, 32, 3), np.float32))

    def test_two_dim_input_becomes_single_channel(self):
        img = ImageBuffer(np.zeros((20, 24), np.uint8))
        assert (img.height, img.width, img.channels) == (20, 24, 1)

    def test_pixels_are_immutable(self):
        img = ImageBuffer.constant(16, 16, 7)
        with pytest.raises(ValueError):
            img.pixels[0, 0, 0] = 1

    def test_png_round_trip_is_lossless(self, tmp_path, textured_image):
        path = tmp_path / "img.png"
        textured_image.save(path)
        assert ImageBuffer.load(path).same_as(textured_image)

    def test_single_channel_png_round_trip(self, tmp_path):
        img = make_textured(32, 32, seed=3, channels=1)
        path = tmp_path / "gray.png"
        img.save(path)
        assert ImageBuffer.load(path).same_as(img)


class TestRounding:
    @pytest.mark.parametrize(
        "value,expected",
        [(0.5, 1.0), (1.5, 2.0), (2.5, 3.0), (-0.5, -1.0), (-1.5, -2.0), (0.49, 0.0), (76.245, 76.0)],
    )
    def test_half_away_from_zero(self, value, expected):
        assert round_half_away(value) == expected

    def test_to_samples_clamps(self):
        out = to_samples(np.array([-3.2, 0.0, 255.4, 300.0]))
        assert out.dtype == np.uint8
        assert list(out) == [0, 0, 255, 255]


class TestJpeg:
    def test_roundtrip_preserves_shape(self, textured_image):
        out = jpeg_roundtrip(textured_image, 80)
        assert out.pixels.shape == textured_image.pixels.shape

    def test_quality_95_on_natural_image_is_mild(self):
        img = make_natural(128, 128, seed=8)
        assert psnr(img, jpeg_roundtrip(img, 95)) >= 35.0

    def test_quality_100_on_constant_image_is_near_lossless(self):
        img = ImageBuffer.constant(64, 64, 128)
        assert psnr(img, jpeg_roundtrip(img, 100)) >= 45.0

    def test_deterministic(self, textured_image):
        assert jpeg_roundtrip(textured_image, 40).same_as(jpeg_roundtrip(textured_image, 40))

    def test_single_channel_keeps_channel_count(self):
        img = make_textured(32, 32, seed=5, channels=1)
        assert jpeg_roundtrip(img, 70).channels == 1

    def test_rejects_bad_quality(self, textured_image):
        with pytest.raises(ValueError):
            jpeg_roundtrip(textured_image, 0)
        with pytest.raises(ValueError):
            jpeg_roundtrip(textured_image, 101)


def test_psnr_identical_is_infinite(textured_image):
    assert math.isinf(psnr(textured_image, textured_image))
