"""Flat key = value config files mirroring every pipeline field.

The same keys round-trip: emit_config() output parsed by parse_config()
reconstructs an identical PipelineConfig, which is what makes dumped
effective configurations reproducible.
"""

from __future__ import annotations

from .ace import AceConfig
from .errors import ConfigError
from .pipeline import PipelineConfig
from .restore import RestoreConfig
from .rtv import RtvConfig
from .texture import DetailConfig

# every recognized key, in emission order
_KEYS = (
    "ace.alpha",
    "ace.sample_stride",
    "rtv.lambda",
    "rtv.epsilon",
    "rtv.delta",
    "rtv.outer_iterations",
    "rtv.linear_tolerance",
    "restore.patch_radius",
    "restore.t0",
    "restore.top_fraction",
    "restore.gamma",
    "detail.sigmas",
    "detail.weights",
    "detail.mask_threshold",
    "dump_intermediates",
)


def _fmt_triple(values) -> str:
    return ", ".join(repr(float(v)) for v in values)


def config_to_items(cfg: PipelineConfig) -> dict[str, str]:
    """Flatten a PipelineConfig into the key -> string-value mapping."""
    return {
        "ace.alpha": repr(cfg.ace.alpha),
        "ace.sample_stride": "auto" if cfg.ace.sample_stride is None else str(cfg.ace.sample_stride),
        "rtv.lambda": repr(cfg.rtv.lam),
        "rtv.epsilon": repr(cfg.rtv.epsilon),
        "rtv.delta": repr(cfg.rtv.delta),
        "rtv.outer_iterations": str(cfg.rtv.outer_iterations),
        "rtv.linear_tolerance": repr(cfg.rtv.linear_tolerance),
        "restore.patch_radius": str(cfg.restore.patch_radius),
        "restore.t0": repr(cfg.restore.t0),
        "restore.top_fraction": repr(cfg.restore.top_fraction),
        "restore.gamma": repr(cfg.restore.gamma),
        "detail.sigmas": _fmt_triple(cfg.detail.sigmas),
        "detail.weights": _fmt_triple(cfg.detail.weights),
        "detail.mask_threshold": repr(cfg.detail.mask_threshold),
        "dump_intermediates": "none" if cfg.dump_intermediates is None else str(cfg.dump_intermediates),
    }


def emit_config(cfg: PipelineConfig) -> str:
    items = config_to_items(cfg)
    return "".join(f"{key} = {items[key]}\n" for key in _KEYS)


def parse_config(text: str) -> dict[str, str]:
    """Parse key = value lines; '#' starts a comment, blanks are skipped."""
    items: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        items[key] = value
    return items


def _parse_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from exc


def _parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from exc


def _parse_triple(key: str, value: str) -> tuple[float, float, float]:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"{key}: expected three comma-separated values, got {value!r}")
    return tuple(_parse_float(key, p) for p in parts)


def config_from_items(items: dict[str, str]) -> PipelineConfig:
    """Build a PipelineConfig from string items, using defaults for gaps."""
    base = config_to_items(PipelineConfig())
    merged = dict(base)
    for key, value in items.items():
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}")
        merged[key] = value

    stride_raw = merged["ace.sample_stride"]
    stride = None if stride_raw == "auto" else _parse_int("ace.sample_stride", stride_raw)
    dump_raw = merged["dump_intermediates"]
    dump = None if dump_raw == "none" else dump_raw

    return PipelineConfig(
        ace=AceConfig(
            alpha=_parse_float("ace.alpha", merged["ace.alpha"]),
            sample_stride=stride,
        ),
        rtv=RtvConfig(
            lam=_parse_float("rtv.lambda", merged["rtv.lambda"]),
            epsilon=_parse_float("rtv.epsilon", merged["rtv.epsilon"]),
            delta=_parse_float("rtv.delta", merged["rtv.delta"]),
            outer_iterations=_parse_int("rtv.outer_iterations", merged["rtv.outer_iterations"]),
            linear_tolerance=_parse_float("rtv.linear_tolerance", merged["rtv.linear_tolerance"]),
        ),
        restore=RestoreConfig(
            patch_radius=_parse_int("restore.patch_radius", merged["restore.patch_radius"]),
            t0=_parse_float("restore.t0", merged["restore.t0"]),
            top_fraction=_parse_float("restore.top_fraction", merged["restore.top_fraction"]),
            gamma=_parse_float("restore.gamma", merged["restore.gamma"]),
        ),
        detail=DetailConfig(
            sigmas=_parse_triple("detail.sigmas", merged["detail.sigmas"]),
            weights=_parse_triple("detail.weights", merged["detail.weights"]),
            mask_threshold=_parse_float("detail.mask_threshold", merged["detail.mask_threshold"]),
        ),
        dump_intermediates=dump,
    )
