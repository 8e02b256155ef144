"""End-to-end enhancement chain and the forward imaging model.

Stage order: color-correct, decompose, restore, texture, reconstruct.
The forward model I = J*t + B*(1-t) doubles as the synthetic-fixture
generator for testing, since inverting it with known t and B must return
the clean image.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ace import AceConfig, ace_correct
from .errors import StageError
from .imagecore import encode_image, require_rgb
from .restore import (
    BackgroundLight,
    RestoreConfig,
    background_light,
    candidate_mask,
    estimate_transmission,
    recover,
    tone_is_blue,
)
from .rtv import RtvConfig, decompose
from .texture import DetailConfig, enhance_texture

STAGE_NAMES = ("color-correct", "decompose", "restore", "texture", "reconstruct")

# Texture layers are visualized with this gain and offset so signed values
# around zero land mid-gray.
TEXTURE_VIZ_GAIN = 10.0
TEXTURE_VIZ_OFFSET = 0.5


@dataclass(frozen=True)
class PipelineConfig:
    ace: AceConfig = field(default_factory=AceConfig)
    rtv: RtvConfig = field(default_factory=RtvConfig)
    restore: RestoreConfig = field(default_factory=RestoreConfig)
    detail: DetailConfig = field(default_factory=DetailConfig)
    dump_intermediates: str | None = None


@dataclass(frozen=True)
class StageRecord:
    name: str
    seconds: float
    stats: dict


@dataclass(frozen=True)
class PipelineReport:
    background: BackgroundLight
    tone: str
    stages: tuple[StageRecord, ...]

    def to_json_dict(self) -> dict:
        """JSON projection of the report.

        Wall times are deliberately left out: dumped reports must be
        byte-identical across reruns of the same invocation.
        """
        return {
            "background": {
                "b_r": self.background.b_r,
                "b_g": self.background.b_g,
                "b_b": self.background.b_b,
            },
            "tone": self.tone,
            "stages": [{"name": s.name, "stats": s.stats} for s in self.stages],
        }


def _plane_stats(arr: np.ndarray) -> dict:
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return {
        "min": [float(v) for v in arr.min(axis=(0, 1))],
        "max": [float(v) for v in arr.max(axis=(0, 1))],
        "mean": [float(v) for v in arr.mean(axis=(0, 1))],
    }


def apply_forward_model(clean: np.ndarray, t: np.ndarray, light: BackgroundLight) -> np.ndarray:
    """Degrade a clean image: I = J*t + B*(1-t) per channel."""
    clean = np.asarray(clean, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    tm = t[:, :, None]
    return clean * tm + light.as_array() * (1.0 - tm)


def reconstruct(structure: np.ndarray, detail: np.ndarray, t: np.ndarray, t0: float = 0.1) -> np.ndarray:
    """Recompose: J = J_s + J_c / max(t, t0), clamped to [0,1]."""
    structure = np.asarray(structure, dtype=np.float64)
    detail = np.asarray(detail, dtype=np.float64)
    tau = 1.0 / np.maximum(np.asarray(t, dtype=np.float64), t0)
    return np.clip(structure + tau[:, :, None] * detail, 0.0, 1.0)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def enhance(img: np.ndarray, cfg: PipelineConfig | None = None, stem: str = "image"):
    """Run the full enhancement chain on one image.

    Args:
        img: (h, w, 3) degraded image in [0, 1], at least 8x8.
        cfg: pipeline configuration; defaults throughout when omitted.
        stem: base name used for intermediate dumps.

    Returns:
        (enhanced image, PipelineReport).
    """
    cfg = cfg or PipelineConfig()
    img = require_rgb(img)

    records = []

    def run(stage, fn):
        t_start = time.perf_counter()
        try:
            result = fn()
        except Exception as exc:
            raise StageError(stage, exc) from exc
        return result, time.perf_counter() - t_start

    corrected, secs = run("color-correct", lambda: ace_correct(img, cfg.ace))
    records.append(StageRecord("color-correct", secs, _plane_stats(corrected)))

    dec, secs = run("decompose", lambda: decompose(corrected, cfg.rtv))
    records.append(StageRecord("decompose", secs, _plane_stats(dec.structure)))

    def restore_stage():
        mask = candidate_mask(dec.structure, cfg.restore)
        light = background_light(dec.structure, mask, cfg.restore)
        t = estimate_transmission(dec.structure, light, cfg.restore)
        j_s = recover(dec.structure, t, light, cfg.restore.t0)
        return light, t, j_s

    (light, t, j_s), secs = run("restore", restore_stage)
    records.append(StageRecord("restore", secs, _plane_stats(j_s)))

    j_c, secs = run("texture", lambda: enhance_texture(dec.texture, cfg.detail))
    records.append(StageRecord("texture", secs, _plane_stats(j_c)))

    out, secs = run("reconstruct", lambda: reconstruct(j_s, j_c, t, cfg.restore.t0))
    records.append(StageRecord("reconstruct", secs, _plane_stats(out)))

    tone = "blue" if tone_is_blue(dec.structure) else "green"
    report = PipelineReport(background=light, tone=tone, stages=tuple(records))

    if cfg.dump_intermediates is not None:
        out_dir = Path(cfg.dump_intermediates)
        out_dir.mkdir(parents=True, exist_ok=True)
        encode_image(corrected, out_dir / f"{stem}.corrected.png")
        encode_image(dec.structure, out_dir / f"{stem}.structure.png")
        viz = TEXTURE_VIZ_GAIN * dec.texture + TEXTURE_VIZ_OFFSET
        encode_image(np.clip(viz, 0.0, 1.0), out_dir / f"{stem}.texture.png")
        encode_image(t, out_dir / f"{stem}.transmission.png")
        _write_json(
            out_dir / f"{stem}.background.json",
            {"b_r": light.b_r, "b_g": light.b_g, "b_b": light.b_b},
        )
        _write_json(out_dir / f"{stem}.report.json", report.to_json_dict())

    return out, report
