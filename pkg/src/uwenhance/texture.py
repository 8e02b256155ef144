"""Texture-layer detail boosting and DCT-based artifact masking.

Detail is accumulated over three Gaussian scales; fine detail with positive
overshoot is damped through the sign-coupled first term. An 8x8 block DCT
then measures how much energy sits outside the three lowest coefficients,
and blocks below the threshold are zeroed so noise is not amplified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft
from scipy.ndimage import convolve1d

from .errors import DimensionError, ParameterError

BLOCK = 8

# Rec.601 luma weights, used to collapse the signed texture planes into the
# single plane the block mask is computed on.
_LUMA = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class DetailConfig:
    sigmas: tuple[float, float, float] = (1.0, 2.0, 4.0)
    weights: tuple[float, float, float] = (0.5, 0.5, 0.25)
    mask_threshold: float = 0.1

    def __post_init__(self):
        if len(self.sigmas) != 3 or any(s <= 0 for s in self.sigmas):
            raise ParameterError(f"sigmas must be three positive values, got {self.sigmas}")
        if len(self.weights) != 3:
            raise ParameterError(f"weights must be three values, got {self.weights}")
        if self.mask_threshold < 0:
            raise ParameterError(f"mask_threshold must be >= 0, got {self.mask_threshold}")


def _gauss1d(sigma: float) -> np.ndarray:
    radius = math.ceil(3.0 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def _blur(planes: np.ndarray, sigma: float) -> np.ndarray:
    k = _gauss1d(sigma)
    tmp = convolve1d(planes, k, axis=0, mode="reflect")
    return convolve1d(tmp, k, axis=1, mode="reflect")


def multiscale_detail(texture: np.ndarray, cfg: DetailConfig | None = None) -> np.ndarray:
    """Three-scale detail image from a signed texture layer.

    C1/C2/C3 are the band-pass differences of successive Gaussian blurs;
    the combined detail is (1 - w1*sgn(C1))*C1 + w2*C2 + w3*C3 with
    sgn(0) = 0, clamped to [-1, 1].
    """
    cfg = cfg or DetailConfig()
    w = np.asarray(texture, dtype=np.float64)
    b1 = _blur(w, cfg.sigmas[0])
    b2 = _blur(w, cfg.sigmas[1])
    b3 = _blur(w, cfg.sigmas[2])
    c1 = w - b1
    c2 = b1 - b2
    c3 = b2 - b3
    w1, w2, w3 = cfg.weights
    combined = (1.0 - w1 * np.sign(c1)) * c1 + w2 * c2 + w3 * c3
    return np.clip(combined, -1.0, 1.0)


def block_residual_energy(block: np.ndarray) -> float:
    """Energy of an 8x8 block outside its three lowest DCT coefficients.

    Uses the orthonormal 2-D DCT-II, so the total coefficient energy equals
    the block's sum of squares and the mask threshold is scale-meaningful.
    Subtracted terms are (1,1), (1,2) and (2,2) in 1-based indexing.
    """
    block = np.asarray(block, dtype=np.float64)
    if block.shape != (BLOCK, BLOCK):
        raise DimensionError(f"expected {BLOCK}x{BLOCK} block, got shape {block.shape}")
    coeff = scipy.fft.dctn(block, type=2, norm="ortho")
    sq = coeff * coeff
    return float(sq.sum() - sq[0, 0] - sq[0, 1] - sq[1, 1])


def _pad_to_blocks(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    pad_h = (-h) % BLOCK
    pad_w = (-w) % BLOCK
    if pad_h or pad_w:
        plane = np.pad(plane, ((0, pad_h), (0, pad_w)), mode="reflect")
    return plane


def detail_mask(detail: np.ndarray, cfg: DetailConfig | None = None) -> np.ndarray:
    """Block-constant 0/1 mask of where residual detail energy is high.

    The mask is computed once on the luma-combined plane and shared by all
    channels so it cannot introduce color fringes.
    """
    cfg = cfg or DetailConfig()
    detail = np.asarray(detail, dtype=np.float64)
    if detail.ndim != 3 or detail.shape[2] != 3:
        raise DimensionError(f"expected (h, w, 3) texture, got shape {detail.shape}")
    h, w = detail.shape[:2]
    plane = (
        _LUMA[0] * detail[:, :, 0]
        + _LUMA[1] * detail[:, :, 1]
        + _LUMA[2] * detail[:, :, 2]
    )
    padded = _pad_to_blocks(plane)
    ph, pw = padded.shape
    blocks = padded.reshape(ph // BLOCK, BLOCK, pw // BLOCK, BLOCK).transpose(0, 2, 1, 3)
    coeff = scipy.fft.dctn(blocks, type=2, norm="ortho", axes=(2, 3))
    sq = coeff * coeff
    energy = sq.sum(axis=(2, 3)) - sq[:, :, 0, 0] - sq[:, :, 0, 1] - sq[:, :, 1, 1]
    block_mask = energy > cfg.mask_threshold
    full = np.repeat(np.repeat(block_mask, BLOCK, axis=0), BLOCK, axis=1)
    return full[:h, :w]


def enhance_texture(texture: np.ndarray, cfg: DetailConfig | None = None) -> np.ndarray:
    """Masked detail layer: multiscale detail kept only in high-energy blocks."""
    cfg = cfg or DetailConfig()
    detail = multiscale_detail(texture, cfg)
    mask = detail_mask(detail, cfg)
    return detail * mask[:, :, None].astype(np.float64)
