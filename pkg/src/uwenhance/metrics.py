"""No-reference quality metrics and the CIEDE2000 color difference.

UCIQE combines chroma spread, luminance contrast and mean saturation in
CIELAB; entropy measures per-channel information content at 8-bit
quantization; CIEDE2000 is the standard formula with unit parametric
factors including the blue-region rotation term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RegionError
from .imagecore import quantize255, rgb_to_lab

# Weighting constants of the UCIQE combination, from the metric's source.
UCIQE_C1 = 0.4680
UCIQE_C2 = 0.2745
UCIQE_C3 = 0.2576


@dataclass(frozen=True)
class MetricReport:
    uciqe: float
    entropy_bits: float
    ciede2000_mean: float | None = None


def uciqe(img: np.ndarray) -> float:
    """UCIQE score; chroma and L are put on [0,1] scales first.

    con_luma compares the means of the top and bottom 1% of L values
    (at least one pixel each), so a uniform image scores exactly 0.
    """
    lab = rgb_to_lab(np.asarray(img, dtype=np.float64))
    l01 = lab[..., 0].ravel() / 100.0
    chroma01 = np.sqrt(lab[..., 1] ** 2 + lab[..., 2] ** 2).ravel() / 100.0

    sigma_chroma = float(np.std(chroma01))

    n = l01.size
    k = max(1, int(round(0.01 * n)))
    l_sorted = np.sort(l01)
    con_luma = float(np.mean(l_sorted[n - k :]) - np.mean(l_sorted[:k]))

    denom = np.sqrt(chroma01**2 + l01**2)
    saturation = np.divide(chroma01, denom, out=np.zeros_like(chroma01), where=denom > 0)
    mu_sat = float(np.mean(saturation))

    return UCIQE_C1 * sigma_chroma + UCIQE_C2 * con_luma + UCIQE_C3 * mu_sat


def entropy(img: np.ndarray) -> float:
    """Mean over channels of the 256-bin Shannon entropy, in bits."""
    img = np.asarray(img, dtype=np.float64)
    levels = quantize255(img)
    total = levels.shape[0] * levels.shape[1]
    acc = 0.0
    for ch in range(3):
        counts = np.bincount(levels[:, :, ch].ravel(), minlength=256)
        p = counts[counts > 0] / total
        acc += float(-np.sum(p * np.log2(p)))
    return acc / 3.0


def ciede2000(lab1, lab2) -> float:
    """CIEDE2000 color difference with k_L = k_C = k_H = 1."""
    l1, a1, b1 = (float(v) for v in lab1)
    l2, a2, b2 = (float(v) for v in lab2)

    c1 = math.hypot(a1, b1)
    c2 = math.hypot(a2, b2)
    c_bar = 0.5 * (c1 + c2)
    g = 0.5 * (1.0 - math.sqrt(c_bar**7 / (c_bar**7 + 25.0**7))) if c_bar > 0 else 0.0
    a1p = (1.0 + g) * a1
    a2p = (1.0 + g) * a2
    c1p = math.hypot(a1p, b1)
    c2p = math.hypot(a2p, b2)

    def hue_deg(ap, b):
        if ap == 0.0 and b == 0.0:
            return 0.0
        h = math.degrees(math.atan2(b, ap))
        return h + 360.0 if h < 0 else h

    h1p = hue_deg(a1p, b1)
    h2p = hue_deg(a2p, b2)

    dl = l2 - l1
    dc = c2p - c1p

    if c1p * c2p == 0.0:
        dh = 0.0
    else:
        dh = h2p - h1p
        if dh > 180.0:
            dh -= 360.0
        elif dh < -180.0:
            dh += 360.0
    dbig_h = 2.0 * math.sqrt(c1p * c2p) * math.sin(math.radians(dh) / 2.0)

    l_bar = 0.5 * (l1 + l2)
    cp_bar = 0.5 * (c1p + c2p)
    if c1p * c2p == 0.0:
        h_bar = h1p + h2p
    else:
        h_sum = h1p + h2p
        if abs(h1p - h2p) <= 180.0:
            h_bar = 0.5 * h_sum
        elif h_sum < 360.0:
            h_bar = 0.5 * (h_sum + 360.0)
        else:
            h_bar = 0.5 * (h_sum - 360.0)

    t = (
        1.0
        - 0.17 * math.cos(math.radians(h_bar - 30.0))
        + 0.24 * math.cos(math.radians(2.0 * h_bar))
        + 0.32 * math.cos(math.radians(3.0 * h_bar + 6.0))
        - 0.20 * math.cos(math.radians(4.0 * h_bar - 63.0))
    )
    dtheta = 30.0 * math.exp(-(((h_bar - 275.0) / 25.0) ** 2))
    r_c = 2.0 * math.sqrt(cp_bar**7 / (cp_bar**7 + 25.0**7))
    s_l = 1.0 + 0.015 * (l_bar - 50.0) ** 2 / math.sqrt(20.0 + (l_bar - 50.0) ** 2)
    s_c = 1.0 + 0.045 * cp_bar
    s_h = 1.0 + 0.015 * cp_bar * t
    r_t = -math.sin(math.radians(2.0 * dtheta)) * r_c

    term_l = dl / s_l
    term_c = dc / s_c
    term_h = dbig_h / s_h
    return math.sqrt(term_l**2 + term_c**2 + term_h**2 + r_t * term_c * term_h)


def color_card_score(img: np.ndarray, reference_patches) -> float:
    """Mean CIEDE2000 between region-mean Lab values and their references.

    Args:
        img: (h, w, 3) image in [0, 1].
        reference_patches: iterable of ((top, left, bottom, right), lab)
            with half-open pixel bounds and a reference Lab triple.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    scores = []
    for region, ref in reference_patches:
        top, left, bottom, right = (int(v) for v in region)
        if not (0 <= top < bottom <= h and 0 <= left < right <= w):
            raise RegionError(f"region {region} outside {w}x{h} image")
        mean_lab = rgb_to_lab(img[top:bottom, left:right]).mean(axis=(0, 1))
        scores.append(ciede2000(mean_lab, ref))
    if not scores:
        raise RegionError("no reference patches given")
    return float(np.mean(scores))
