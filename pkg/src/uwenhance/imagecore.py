"""Image containers, codecs, color conversion, histograms.

Conventions used everywhere in this package:

* an RGB image is a float64 array of shape (h, w, 3) with values in [0, 1]
  (texture layers are signed and may span [-1, 1]);
* a gray image is a float64 array of shape (h, w);
* a Lab image is a float64 array of shape (h, w, 3) holding L in [0, 100]
  and signed a, b.

Images must be at least 8x8 so that 8x8 DCT blocking and patch minima are
well defined.
"""

from __future__ import annotations

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, DimensionError, EncodeError

MIN_SIDE = 8

# sRGB -> XYZ (D65, 2-degree observer), rows X/Y/Z.
_SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
# White point taken as the matrix row sums so that (1,1,1) maps to exactly
# L=100, a=b=0 and any gray stays exactly neutral.
_WHITE = _SRGB_TO_XYZ.sum(axis=1)

_LAB_DELTA = 6.0 / 29.0


def require_rgb(img: np.ndarray) -> np.ndarray:
    """Validate the (h, w, 3) float convention and minimum size."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise DimensionError(f"expected (h, w, 3) image, got shape {img.shape}")
    if img.shape[0] < MIN_SIDE or img.shape[1] < MIN_SIDE:
        raise DimensionError(
            f"image {img.shape[1]}x{img.shape[0]} is below the {MIN_SIDE}x{MIN_SIDE} minimum"
        )
    if not np.all(np.isfinite(img)):
        raise DimensionError("image contains non-finite values")
    return img


def decode_image(path) -> np.ndarray:
    """Read a raster file (PNG/JPEG/PPM) into a [0,1] float RGB array.

    Raises DecodeError for unreadable files and DimensionError for images
    smaller than 8x8.
    """
    try:
        with Image.open(path) as im:
            rgb = im.convert("RGB")
            arr = np.asarray(rgb, dtype=np.float64)
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        raise DecodeError(path, str(exc)) from exc
    if arr.shape[0] < MIN_SIDE or arr.shape[1] < MIN_SIDE:
        raise DimensionError(
            f"image {arr.shape[1]}x{arr.shape[0]} is below the {MIN_SIDE}x{MIN_SIDE} minimum"
        )
    return arr / 255.0


def quantize255(values: np.ndarray) -> np.ndarray:
    """Clamp to [0,1] and round to integer levels 0..255."""
    v = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    return np.rint(v * 255.0).astype(np.int64)


def encode_image(img: np.ndarray, path) -> None:
    """Write an image as 8-bit PNG (values clamped to [0,1] first).

    PNG is the only write format: the determinism contract needs a lossless
    round trip. Gray (h, w) input is written as single-channel PNG.
    """
    p = str(path)
    if not p.lower().endswith(".png"):
        raise EncodeError(path, "only PNG output is supported")
    arr = np.asarray(img, dtype=np.float64)
    data = quantize255(arr).astype(np.uint8)
    if arr.ndim == 2:
        pil = Image.fromarray(data, mode="L")
    elif arr.ndim == 3 and arr.shape[2] == 3:
        pil = Image.fromarray(data, mode="RGB")
    else:
        raise EncodeError(path, f"unsupported array shape {arr.shape}")
    try:
        pil.save(p, format="PNG")
    except OSError as exc:
        raise EncodeError(path, str(exc)) from exc


def _srgb_to_linear(v: np.ndarray) -> np.ndarray:
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def _lab_f(t: np.ndarray) -> np.ndarray:
    d3 = _LAB_DELTA**3
    return np.where(t > d3, np.cbrt(t), t / (3.0 * _LAB_DELTA**2) + 4.0 / 29.0)


def rgb_to_lab(img: np.ndarray) -> np.ndarray:
    """Convert a [0,1] RGB image to CIELAB (D65, standard sRGB decoding).

    Args:
        img: (h, w, 3) array in [0, 1].

    Returns:
        (h, w, 3) array with L in [0, 100] and signed a, b.
    """
    linear = _srgb_to_linear(np.asarray(img, dtype=np.float64))
    xyz = linear @ _SRGB_TO_XYZ.T
    f = _lab_f(xyz / _WHITE)
    lab = np.empty_like(xyz)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def luminance255(img: np.ndarray) -> np.ndarray:
    """CIELAB L of the image rescaled from [0,100] to the [0,255] range."""
    return rgb_to_lab(img)[..., 0] * 2.55


def histogram256(levels: np.ndarray) -> np.ndarray:
    """256-bin count histogram of integer levels already in 0..255."""
    lv = np.asarray(levels)
    return np.bincount(lv.ravel(), minlength=256)[:256]
