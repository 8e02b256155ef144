"""Shared synthetic scenes.

All fixtures are factories returning freshly built arrays so tests cannot
contaminate each other through shared buffers.
"""

import numpy as np
import pytest
from scipy.ndimage import gaussian_filter


def _smooth_plane(seed: int, h: int, w: int, sigma: float = 3.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    plane = gaussian_filter(rng.uniform(0.0, 1.0, (h, w)), sigma=sigma)
    lo, hi = plane.min(), plane.max()
    return 0.1 + 0.8 * (plane - lo) / (hi - lo)


def build_smooth_rgb(seed: int, h: int = 64, w: int = 64) -> np.ndarray:
    """Blurred-noise color image spanning a healthy chunk of [0,1]."""
    return np.stack(
        [_smooth_plane(seed + k, h, w) for k in range(3)], axis=2
    )


def build_natural_rgb(seed: int, h: int = 64, w: int = 64) -> np.ndarray:
    """Smooth base plus flat patches and mild grain, loosely photo-like."""
    rng = np.random.default_rng(seed)
    img = build_smooth_rgb(seed, h, w)
    for _ in range(3):
        top = int(rng.integers(0, h - h // 4))
        left = int(rng.integers(0, w - w // 4))
        hh = int(rng.integers(h // 8, h // 4))
        ww = int(rng.integers(w // 8, w // 4))
        img[top : top + hh, left : left + ww] = rng.uniform(0.15, 0.85, 3)
    img += rng.normal(0.0, 0.02, img.shape)
    return np.clip(img, 0.0, 1.0)


def build_step_sine(h: int = 16, w: int = 16):
    """Step edge at mid-width with a period-4 horizontal sine on top.

    Returns (textured, clean_step) single-channel pairs.
    """
    clean = np.full((h, w), 0.2)
    clean[:, w // 2 :] = 0.8
    x = np.arange(w, dtype=np.float64)
    sine = 0.05 * np.sin(2.0 * np.pi * x / 4.0)
    return clean + sine[None, :], clean


def build_checker(h: int, w: int, lo: float, hi: float) -> np.ndarray:
    yy, xx = np.mgrid[0:h, 0:w]
    return np.where((yy + xx) % 2 == 0, lo, hi).astype(np.float64)


def build_mask_scene():
    """Checkerboard background with one flat bright square.

    The checker keeps the gradient-histogram mode well above the gamma cap,
    so the flat test stays meaningful; the square is the only bright flat
    region. Returns (image, square_slice).
    """
    img = np.empty((64, 64, 3))
    img[:] = build_checker(64, 64, 0.1, 0.2)[:, :, None]
    sq = (slice(24, 40), slice(24, 40))
    img[sq[0], sq[1]] = (0.3, 0.5, 0.9)
    return img, sq


def build_light_scene():
    """Flat dark background with one flat bright square, known light."""
    img = np.empty((64, 64, 3))
    img[:] = (0.05, 0.10, 0.12)
    img[24:40, 24:40] = (0.3, 0.5, 0.9)
    return img, (0.3, 0.5, 0.9)


def build_balanced_rgb(seed: int, h: int = 64, w: int = 64) -> np.ndarray:
    """Gray-world clean scene: every channel renormalized to mean 0.5.

    The enhancement chain equalizes channel statistics, so recovery toward
    the original is only a fair ask when the original is itself balanced.
    """
    img = build_natural_rgb(seed, h, w)
    for c in range(3):
        ch = img[:, :, c]
        ch = (ch - ch.mean()) / max(ch.std(), 1e-9) * 0.15 + 0.5
        img[:, :, c] = np.clip(ch, 0.02, 0.98)
    return img


def build_block_scene(seed: int = 0, h: int = 64, w: int = 64, ripple: float = 0.005) -> np.ndarray:
    """Piecewise-constant 16px blocks with a faint fine ripple on top.

    Block levels include each channel's extremes as whole regions, so after
    contrast stretching the image extremes are coherent structure instead of
    isolated pixels that smoothing would shove into the texture layer.
    """
    rng = np.random.default_rng(seed)
    levels = np.array([0.06, 0.35, 0.65, 0.94])
    img = np.empty((h, w, 3))
    for c in range(3):
        grid = rng.choice(levels, size=(h // 16, w // 16))
        grid[0, 0], grid[-1, -1] = levels[0], levels[-1]
        img[:, :, c] = np.repeat(np.repeat(grid, 16, 0), 16, 1)
    yy, xx = np.mgrid[0:h, 0:w]
    wave = ripple * np.sin(2.0 * np.pi * xx / 4.0) * np.cos(2.0 * np.pi * yy / 3.0)
    return np.clip(img + wave[:, :, None], 0.0, 1.0)


WATER_COLOR = (0.30, 0.72, 0.88)
ACCENT_COLORS = (
    (0.62, 0.22, 0.16),  # red coral
    (0.55, 0.48, 0.34),  # sand patch
    (0.14, 0.30, 0.24),  # weed
    (0.66, 0.40, 0.22),  # orange fish
)


def build_water_scene(seed: int, h: int = 64, w: int = 64, sigma: float = 0.01) -> np.ndarray:
    """Open-water scene: bright blue column with scattered darker accents.

    The water dominates, so the light estimate lands on it and the recovery
    step stays a mild expansion around the bulk of the histogram; the red
    accents keep the flipped-red dark channel well fed so transmission does
    not collapse to its floor. At least one red block is always present.
    """
    rng = np.random.default_rng(seed)
    img = np.empty((h, w, 3))
    img[:] = WATER_COLOR
    gh, gw = h // 16, w // 16
    cells = rng.permutation(gh * gw)[:8]
    for cell in cells:
        gy, gx = divmod(int(cell), gw)
        color = ACCENT_COLORS[int(rng.integers(0, len(ACCENT_COLORS)))]
        img[gy * 16:(gy + 1) * 16, gx * 16:(gx + 1) * 16] = color
    gy, gx = divmod(int(cells[0]), gw)
    img[gy * 16:(gy + 1) * 16, gx * 16:(gx + 1) * 16] = ACCENT_COLORS[0]
    img += rng.normal(0.0, sigma, img.shape)
    return np.clip(img, 0.0, 1.0)


@pytest.fixture
def smooth_rgb():
    return build_smooth_rgb


@pytest.fixture
def natural_rgb():
    return build_natural_rgb


@pytest.fixture
def step_sine():
    return build_step_sine


@pytest.fixture
def checker():
    return build_checker


@pytest.fixture
def mask_scene():
    return build_mask_scene


@pytest.fixture
def light_scene():
    return build_light_scene
