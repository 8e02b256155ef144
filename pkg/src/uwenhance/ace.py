"""Automatic color equalization: pairwise intensity adjustment + linear mapping.

Each output pixel is a distance-weighted sum of slope-clipped differences
against every other pixel, followed by a per-channel linear stretch to [0,1].
The pairwise sum is quadratic in pixel count, so images above a size floor
use a regular subsample of the comparison positions (the formula is
unchanged, only the set of y positions shrinks). Size floors live at the
pipeline boundary; these functions accept any non-empty channel so the tiny
hand-checkable cases stay valid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError

# Exact summation is kept up to this pixel count; beyond it a strided
# subsample of comparison positions is used (default stride targets
# AUTO_SAMPLE_TARGET samples per pixel, far below the 16384 cap).
EXACT_PIXEL_LIMIT = 16384
AUTO_SAMPLE_TARGET = 256

# Corrected output lands on this dyadic grid; the structure layer downstream
# uses the 2x finer one, which makes corrected - structure exact (23-bit
# integers in a 53-bit mantissa) and the split bitwise additive.
OUTPUT_GRID = 2.0**20


@dataclass(frozen=True)
class AceConfig:
    """Slope strength and sampling control.

    sample_stride None picks the stride automatically: 1 (exact) for images
    up to EXACT_PIXEL_LIMIT pixels, otherwise the smallest stride that keeps
    roughly AUTO_SAMPLE_TARGET comparison samples per pixel.
    """

    alpha: float = 8.0
    sample_stride: int | None = None

    def __post_init__(self):
        if self.alpha < 1.0:
            raise ParameterError(f"alpha must be >= 1, got {self.alpha}")
        if self.sample_stride is not None and self.sample_stride < 1:
            raise ParameterError(f"sample_stride must be >= 1, got {self.sample_stride}")


def slope(t, alpha: float):
    """Clipped linear slope: min(max(alpha * t, -1), 1). Odd in t."""
    if alpha < 1.0:
        raise ParameterError(f"alpha must be >= 1, got {alpha}")
    return np.clip(np.multiply(t, alpha), -1.0, 1.0)


def resolve_stride(height: int, width: int, cfg: AceConfig) -> int:
    if cfg.sample_stride is not None:
        return cfg.sample_stride
    n = height * width
    if n <= EXACT_PIXEL_LIMIT:
        return 1
    return math.ceil(math.sqrt(n / AUTO_SAMPLE_TARGET))


def _adjust_planes(planes: np.ndarray, alpha: float, stride: int) -> np.ndarray:
    """Pairwise adjustment for (h, w, c) planes sharing one sample grid.

    The distance weighting 1/||x-y|| depends only on positions, so the
    weight rows are computed once per image row and reused across channels.
    The exact path (stride 1) runs in float64; the subsampled path runs in
    float32, where the approximation error is far below the sampling error.
    """
    h, w, nc = planes.shape
    exact = stride == 1
    dtype = np.float64 if exact else np.float32

    work = planes.astype(dtype, copy=False)
    sy = np.arange(0, h, stride)
    sx = np.arange(0, w, stride)
    gy, gx = np.meshgrid(sy, sx, indexing="ij")
    gy = gy.ravel()
    gx = gx.ravel()
    m = gy.size
    samples = work[gy, gx, :]

    # Reciprocal Euclidean distance looked up by (|dy|, |dx|); the (0,0)
    # entry is zeroed so a pixel never compares against itself.
    ay = np.arange(h, dtype=dtype)
    ax = np.arange(w, dtype=dtype)
    with np.errstate(divide="ignore"):
        table = 1.0 / np.sqrt(ay[:, None] ** 2 + ax[None, :] ** 2)
    table[0, 0] = 0.0
    table_flat = table.ravel()

    # |x_col - sx| is row-independent; precompute the flat-index component.
    dc = np.abs(np.arange(w)[:, None] - gx[None, :]).astype(np.int64)

    if not exact:
        # fold alpha into the operands: alpha*(I(x)-I(y)) == alpha*I(x) - alpha*I(y)
        work = work * dtype(alpha)
        samples = samples * dtype(alpha)

    out = np.empty((h, w, nc), dtype=dtype)
    buf = np.empty((w, m), dtype=dtype)
    idx = np.empty((w, m), dtype=np.int64)
    for r in range(h):
        dr = np.abs(r - gy) * w
        np.add(dc, dr[None, :], out=idx)
        wrow = np.take(table_flat, idx)
        for ch in range(nc):
            np.subtract(work[r, :, ch][:, None], samples[None, :, ch], out=buf)
            if exact:
                np.multiply(buf, alpha, out=buf)
            np.clip(buf, -1.0, 1.0, out=buf)
            np.multiply(buf, wrow, out=buf)
            out[r, :, ch] = buf.sum(axis=1)
    return out.astype(np.float64)


def chromatic_adjust(channel: np.ndarray, cfg: AceConfig) -> np.ndarray:
    """Signed pairwise adjustment of one [0,1] channel.

    R(x) = sum over sampled y != x of slope(I(x) - I(y), alpha) / ||x - y||,
    with Euclidean pixel distances and row-major summation order.
    """
    channel = np.asarray(channel, dtype=np.float64)
    if channel.ndim != 2:
        raise DimensionError(f"expected (h, w) channel, got shape {channel.shape}")
    stride = resolve_stride(channel.shape[0], channel.shape[1], cfg)
    return _adjust_planes(channel[:, :, None], cfg.alpha, stride)[:, :, 0]


def stretch(adjusted: np.ndarray) -> np.ndarray:
    """Linear map of a signed adjustment onto [0,1].

    Degenerate spans (max - min below 1e-12) map to the all-0.5 channel,
    the fixed point the rest of the pipeline expects for flat inputs.
    """
    adjusted = np.asarray(adjusted, dtype=np.float64)
    lo = adjusted.min()
    hi = adjusted.max()
    span = hi - lo
    if span < 1e-12:
        return np.full_like(adjusted, 0.5)
    return (adjusted - lo) / span


def ace_correct(img: np.ndarray, cfg: AceConfig | None = None) -> np.ndarray:
    """Per-channel chromatic adjustment followed by the linear stretch.

    The result is snapped to the 2^-20 dyadic grid (half a million levels,
    error under 5e-7): downstream decomposition relies on corrected values
    sitting on a coarser grid than the structure layer so that the
    structure/texture split stays bitwise additive.
    """
    cfg = cfg or AceConfig()
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise DimensionError(f"expected (h, w, 3) image, got shape {img.shape}")
    stride = resolve_stride(img.shape[0], img.shape[1], cfg)
    adjusted = _adjust_planes(img, cfg.alpha, stride)
    out = np.empty_like(adjusted)
    for ch in range(3):
        out[:, :, ch] = stretch(adjusted[:, :, ch])
    return np.round(out * OUTPUT_GRID) / OUTPUT_GRID
