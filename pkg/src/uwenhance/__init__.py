"""Underwater image enhancement through structure/texture reconstruction.

The processing chain: automatic color enhancement, edge-preserving
structure extraction with the texture residual, physics-based restoration
of the structure layer (red dark channel transmission plus background
light), multi-scale detail boosting of the texture layer gated by a DCT
activity mask, and recomposition. No-reference quality metrics (UCIQE,
entropy, CIEDE2000) live in the metrics module.
"""

from .ace import AceConfig, ace_correct, chromatic_adjust, stretch
from .errors import (
    ConfigError,
    ConvergenceError,
    DecodeError,
    DegenerateLightError,
    DimensionError,
    EmptyMaskError,
    EncodeError,
    ParameterError,
    RegionError,
    StageError,
    ToolkitError,
)
from .imagecore import decode_image, encode_image, luminance255, rgb_to_lab
from .metrics import MetricReport, ciede2000, color_card_score, entropy, uciqe
from .pipeline import (
    PipelineConfig,
    PipelineReport,
    StageRecord,
    apply_forward_model,
    enhance,
    reconstruct,
)
from .restore import (
    BackgroundLight,
    RestoreConfig,
    background_light,
    candidate_mask,
    estimate_transmission,
    recover,
    red_dark_channel,
    tone_is_blue,
)
from .rtv import Decomposition, RtvConfig, decompose, rtv_objective, rtv_smooth
from .texture import (
    DetailConfig,
    block_residual_energy,
    detail_mask,
    enhance_texture,
    multiscale_detail,
)

__version__ = "0.1.0"

__all__ = [
    "AceConfig",
    "BackgroundLight",
    "ConfigError",
    "ConvergenceError",
    "DecodeError",
    "Decomposition",
    "DegenerateLightError",
    "DetailConfig",
    "DimensionError",
    "EmptyMaskError",
    "EncodeError",
    "MetricReport",
    "ParameterError",
    "PipelineConfig",
    "PipelineReport",
    "RegionError",
    "RestoreConfig",
    "RtvConfig",
    "StageError",
    "StageRecord",
    "ToolkitError",
    "ace_correct",
    "apply_forward_model",
    "background_light",
    "block_residual_energy",
    "candidate_mask",
    "chromatic_adjust",
    "ciede2000",
    "color_card_score",
    "decode_image",
    "decompose",
    "detail_mask",
    "encode_image",
    "enhance",
    "enhance_texture",
    "entropy",
    "estimate_transmission",
    "luminance255",
    "multiscale_detail",
    "recover",
    "reconstruct",
    "red_dark_channel",
    "rgb_to_lab",
    "rtv_objective",
    "rtv_smooth",
    "stretch",
    "tone_is_blue",
    "uciqe",
    "__version__",
]
