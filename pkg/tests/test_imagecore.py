import numpy as np
import pytest
from PIL import Image

from uwenhance.errors import DecodeError, DimensionError, EncodeError
from uwenhance.imagecore import (
    decode_image,
    encode_image,
    histogram256,
    luminance255,
    quantize255,
    rgb_to_lab,
)

from oracles import scalar_rgb_to_lab


def _write_png(path, arr_u8):
    Image.fromarray(arr_u8, mode="RGB").save(path, format="PNG")


class TestDecode:
    def test_endpoint_values(self, tmp_path):
        data = np.zeros((8, 8, 3), dtype=np.uint8)
        data[0, 0] = 255
        data[0, 1] = 128
        p = tmp_path / "px.png"
        _write_png(p, data)
        img = decode_image(p)
        assert img[0, 0, 0] == 1.0
        assert img[0, 1, 0] == 128 / 255
        assert img[1, 1, 0] == 0.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(DecodeError) as exc:
            decode_image(tmp_path / "nope.png")
        assert "nope.png" in str(exc.value)

    def test_garbage_file(self, tmp_path):
        p = tmp_path / "junk.png"
        p.write_bytes(b"not a png at all")
        with pytest.raises(DecodeError):
            decode_image(p)

    def test_too_small(self, tmp_path):
        p = tmp_path / "tiny.png"
        _write_png(p, np.zeros((4, 4, 3), dtype=np.uint8))
        with pytest.raises(DimensionError):
            decode_image(p)

    def test_jpeg_readable(self, tmp_path):
        p = tmp_path / "img.jpg"
        Image.fromarray(
            np.full((16, 16, 3), 90, dtype=np.uint8), mode="RGB"
        ).save(p, format="JPEG")
        img = decode_image(p)
        assert img.shape == (16, 16, 3)
        assert np.all((img >= 0.0) & (img <= 1.0))


class TestEncode:
    def test_round_trip_error_bound(self, tmp_path):
        rng = np.random.default_rng(0)
        img = rng.uniform(0.0, 1.0, (12, 9, 3))
        p = tmp_path / "rt.png"
        encode_image(img, p)
        back = decode_image(p)
        assert np.abs(back - img).max() <= 1.0 / 255

    def test_decode_encode_decode_idempotent(self, tmp_path):
        rng = np.random.default_rng(1)
        img = rng.uniform(0.0, 1.0, (10, 14, 3))
        p1 = tmp_path / "a.png"
        p2 = tmp_path / "b.png"
        encode_image(img, p1)
        once = decode_image(p1)
        encode_image(once, p2)
        assert np.array_equal(decode_image(p2), once)

    def test_clamps_before_quantizing(self, tmp_path):
        img = np.zeros((8, 8, 3))
        img[0, 0] = 1.0
        img[0, 1] = -0.2
        img[0, 2] = 1.7
        p = tmp_path / "clamp.png"
        encode_image(img, p)
        raw = np.asarray(Image.open(p))
        assert raw[0, 0, 0] == 255
        assert raw[0, 1, 0] == 0
        assert raw[0, 2, 0] == 255

    def test_gray_plane_written_single_channel(self, tmp_path):
        p = tmp_path / "g.png"
        encode_image(np.full((8, 8), 0.5), p)
        with Image.open(p) as im:
            assert im.mode == "L"

    def test_png_only(self, tmp_path):
        with pytest.raises(EncodeError):
            encode_image(np.zeros((8, 8, 3)), tmp_path / "x.jpg")

    def test_bad_shape(self, tmp_path):
        with pytest.raises(EncodeError):
            encode_image(np.zeros((8, 8, 4)), tmp_path / "x.png")


class TestQuantize255:
    def test_rounding_and_clamping(self):
        vals = np.array([0.0, 1.0, -0.5, 2.0, 0.5, 127.4 / 255, 127.6 / 255])
        out = quantize255(vals)
        assert out.tolist() == [0, 255, 0, 255, 128, 127, 128]


class TestLab:
    def test_white(self):
        lab = rgb_to_lab(np.ones((8, 8, 3)))
        assert abs(lab[0, 0, 0] - 100.0) < 1e-9
        assert abs(lab[0, 0, 1]) < 0.01
        assert abs(lab[0, 0, 2]) < 0.01

    def test_black(self):
        lab = rgb_to_lab(np.zeros((8, 8, 3)))
        assert abs(lab[0, 0, 0]) < 1e-9

    def test_mid_gray_lightness(self):
        lab = rgb_to_lab(np.full((8, 8, 3), 0.5))
        assert abs(lab[0, 0, 0] - 53.39) < 0.02

    def test_matches_scalar_reference(self):
        rng = np.random.default_rng(2)
        img = rng.uniform(0.0, 1.0, (8, 8, 3))
        lab = rgb_to_lab(img)
        for y, x in [(0, 0), (3, 5), (7, 7)]:
            ref = scalar_rgb_to_lab(*img[y, x])
            assert np.allclose(lab[y, x], ref, atol=1e-9)

    def test_gray_axis_is_neutral(self):
        grays = np.linspace(0.0, 1.0, 32)
        img = np.repeat(grays, 3).reshape(1, 32, 3)
        img = np.tile(img, (8, 1, 1))
        lab = rgb_to_lab(img)
        assert np.abs(lab[..., 1]).max() < 0.01
        assert np.abs(lab[..., 2]).max() < 0.01


class TestLuminance255:
    def test_endpoints(self):
        assert np.allclose(luminance255(np.ones((8, 8, 3))), 255.0)
        assert np.allclose(luminance255(np.zeros((8, 8, 3))), 0.0)

    def test_mid_gray(self):
        lum = luminance255(np.full((8, 8, 3), 0.5))
        assert abs(lum[0, 0] - 53.39 * 2.55) < 0.05

    def test_monotone_in_gray_level(self):
        grays = np.linspace(0.0, 1.0, 64)
        img = np.repeat(grays, 3).reshape(1, 64, 3)
        img = np.tile(img, (8, 1, 1))
        lum = luminance255(img)[0]
        assert np.all(np.diff(lum) > 0)


class TestHistogram256:
    def test_counts_sum_to_total(self):
        rng = np.random.default_rng(3)
        levels = rng.integers(0, 256, (17, 23))
        hist = histogram256(levels)
        assert hist.shape == (256,)
        assert hist.sum() == levels.size

    def test_known_counts(self):
        levels = np.array([[0, 0, 255], [7, 7, 7]])
        hist = histogram256(levels)
        assert hist[0] == 2
        assert hist[7] == 3
        assert hist[255] == 1
        assert hist.sum() == 6
