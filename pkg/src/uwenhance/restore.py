"""Physics-based restoration of the structure layer.

Underwater light is absorbed fastest in the red channel, so the dark
channel uses 1-R in place of R. Transmission follows from the patch minimum
of the channel ratios against the background light; the background light
itself comes from bright, flat image regions picked by a luminance and
gradient test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import minimum_filter

from .errors import DegenerateLightError, DimensionError, EmptyMaskError, ParameterError
from .imagecore import histogram256, luminance255


@dataclass(frozen=True)
class RestoreConfig:
    """Window size and the guards used during restoration.

    patch_radius r gives (2r+1)^2 minimum windows; t0 floors the
    transmission at use sites; top_fraction is the share of candidates kept
    as background-light pixels; gamma caps the gradient threshold.
    """

    patch_radius: int = 7
    t0: float = 0.1
    top_fraction: float = 0.001
    gamma: float = 20.0

    def __post_init__(self):
        if self.patch_radius < 1:
            raise ParameterError(f"patch_radius must be >= 1, got {self.patch_radius}")
        if not 0.0 < self.t0 < 1.0:
            raise ParameterError(f"t0 must be in (0, 1), got {self.t0}")
        if not 0.0 < self.top_fraction <= 1.0:
            raise ParameterError(f"top_fraction must be in (0, 1], got {self.top_fraction}")
        if self.gamma <= 0:
            raise ParameterError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class BackgroundLight:
    """Per-channel water illumination, each component in (0, 1)."""

    b_r: float
    b_g: float
    b_b: float

    def __post_init__(self):
        for name, v in (("b_r", self.b_r), ("b_g", self.b_g), ("b_b", self.b_b)):
            if not 0.0 < v < 1.0:
                raise ParameterError(f"{name} must lie strictly inside (0, 1), got {v}")

    def as_array(self) -> np.ndarray:
        return np.array([self.b_r, self.b_g, self.b_b])


def _patch_min(plane: np.ndarray, radius: int) -> np.ndarray:
    # replicate boundary so borders are not darkened artificially
    return minimum_filter(plane, size=2 * radius + 1, mode="nearest")


def red_dark_channel(img: np.ndarray, patch_radius: int = 7) -> np.ndarray:
    """Patch minimum of min{1-R, G, B}."""
    img = np.asarray(img, dtype=np.float64)
    pointwise = np.minimum(np.minimum(1.0 - img[:, :, 0], img[:, :, 1]), img[:, :, 2])
    return _patch_min(pointwise, patch_radius)


def estimate_transmission(structure: np.ndarray, light: BackgroundLight, cfg: RestoreConfig | None = None) -> np.ndarray:
    """Backscatter transmission map from the red-dark-channel ratios.

    t(x) = 1 - min over the patch of min{(1-R)/(1-B_r), G/B_g, B/B_b},
    clamped to [0,1]. The t0 floor is applied later, where t is consumed.
    """
    cfg = cfg or RestoreConfig()
    structure = np.asarray(structure, dtype=np.float64)
    if light.b_g <= 1e-6 or light.b_b <= 1e-6:
        raise DegenerateLightError(
            f"background light too small to divide by: g={light.b_g}, b={light.b_b}"
        )
    ratios = np.minimum(
        np.minimum(
            (1.0 - structure[:, :, 0]) / (1.0 - light.b_r),
            structure[:, :, 1] / light.b_g,
        ),
        structure[:, :, 2] / light.b_b,
    )
    t = 1.0 - _patch_min(ratios, cfg.patch_radius)
    return np.clip(t, 0.0, 1.0)


def _gradient_magnitude(plane: np.ndarray) -> np.ndarray:
    # forward differences, replicate boundary (last column/row difference 0)
    dx = np.zeros_like(plane)
    dx[:, :-1] = plane[:, 1:] - plane[:, :-1]
    dy = np.zeros_like(plane)
    dy[:-1, :] = plane[1:, :] - plane[:-1, :]
    return np.sqrt(dx * dx + dy * dy)


def candidate_mask(img: np.ndarray, cfg: RestoreConfig | None = None) -> np.ndarray:
    """Boolean mask of background-light candidate pixels.

    Bright test: luminance H (0-255 scale) at least
    H_mean + (255 - H_mean)/3. Flat test: gradient magnitude of H below
    beta = min(histogram mode of the quantized gradients, gamma). When the
    intersection is empty the top `top_fraction` brightest pixels are used
    instead (ties broken by row-major position).
    """
    cfg = cfg or RestoreConfig()
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise DimensionError(f"expected (h, w, 3) image, got shape {img.shape}")
    h_plane = luminance255(img)
    h_mean = h_plane.mean()
    bright_cut = h_mean + (255.0 - h_mean) / 3.0
    bright = h_plane >= bright_cut

    grad = _gradient_magnitude(h_plane)
    quantized = np.clip(np.rint(grad), 0, 255).astype(np.int64)
    mode = int(np.argmax(histogram256(quantized)))
    beta = min(float(mode), cfg.gamma)
    flat = grad < beta

    mask = bright & flat
    if mask.any():
        return mask
    # fallback: brightest sliver of the image
    n = h_plane.size
    k = max(1, int(round(cfg.top_fraction * n)))
    order = np.argsort(-h_plane.ravel(), kind="stable")
    mask = np.zeros(n, dtype=bool)
    mask[order[:k]] = True
    return mask.reshape(h_plane.shape)


def tone_is_blue(img: np.ndarray) -> bool:
    """Water tone test on image-wide channel means (ties count as blue)."""
    means = np.asarray(img, dtype=np.float64).mean(axis=(0, 1))
    return bool(means[2] >= means[1])


def background_light(img: np.ndarray, mask: np.ndarray, cfg: RestoreConfig | None = None) -> BackgroundLight:
    """Estimate the background light from masked candidate pixels.

    Candidates are ranked by the gray difference B-R (blue tone) or G-R
    (green tone); the 0-255 histogram of that key is accumulated from the
    top down until more than top_fraction of the candidates are covered,
    and the selected pixels' channel means (clamped to [0.05, 0.95]) become
    the estimate.
    """
    cfg = cfg or RestoreConfig()
    img = np.asarray(img, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != img.shape[:2]:
        raise DimensionError(f"mask shape {mask.shape} does not match image {img.shape[:2]}")
    if not mask.any():
        raise EmptyMaskError("background_light requires a non-empty candidate mask")

    if tone_is_blue(img):
        key = img[:, :, 2] - img[:, :, 0]
    else:
        key = img[:, :, 1] - img[:, :, 0]

    candidates = img[mask]
    key_bins = np.clip(np.rint(np.clip(key[mask], 0.0, 1.0) * 255.0), 0, 255).astype(np.int64)
    hist = histogram256(key_bins)
    n = candidates.shape[0]
    needed = cfg.top_fraction * n
    total = 0
    z = 0
    for level in range(255, -1, -1):
        total += int(hist[level])
        if total > needed:
            z = level
            break
    selected = candidates[key_bins >= z]
    means = selected.mean(axis=0)
    clamped = np.clip(means, 0.05, 0.95)
    return BackgroundLight(b_r=float(clamped[0]), b_g=float(clamped[1]), b_b=float(clamped[2]))


def recover(structure: np.ndarray, t: np.ndarray, light: BackgroundLight, t0: float = 0.1) -> np.ndarray:
    """Invert the imaging model on the structure layer.

    J = (S - B) / max(t, t0) + B per channel, clamped to [0,1].
    """
    structure = np.asarray(structure, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if t.shape != structure.shape[:2]:
        raise DimensionError(f"transmission shape {t.shape} does not match image {structure.shape[:2]}")
    denom = np.maximum(t, t0)[:, :, None]
    b = light.as_array()
    return np.clip((structure - b) / denom + b, 0.0, 1.0)
