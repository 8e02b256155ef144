"""Batch command-line front end.

Subcommands: enhance (full chain), decompose (color correction plus the
structure/texture split only), metrics (no-reference quality report), and
synth (degrade a clean image with a known transmission and background
light, for building test fixtures).

Exit codes: 0 full success, 1 any per-file failure (the remaining files
are still processed), 2 invalid invocation. Batches run in sorted path
order and results are reported in that order regardless of --jobs, so a
given invocation always produces byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .ace import ace_correct
from .configfile import config_from_items, emit_config, parse_config
from .errors import ConfigError, ParameterError
from .imagecore import decode_image, encode_image
from .metrics import entropy, uciqe
from .pipeline import (
    TEXTURE_VIZ_GAIN,
    TEXTURE_VIZ_OFFSET,
    PipelineConfig,
    apply_forward_model,
    enhance,
)
from .restore import BackgroundLight
from .rtv import decompose

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".ppm", ".tif", ".tiff"}


def _positive_int(flag: str, raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{flag}: expected an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{flag}: must be >= 1, got {value}")
    return value


def _parse_light(raw: str) -> BackgroundLight:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 3:
        raise ConfigError(f"--b: expected R,G,B, got {raw!r}")
    try:
        r, g, b = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"--b: expected three numbers, got {raw!r}") from None
    return BackgroundLight(r, g, b)


def build_config(args: argparse.Namespace) -> PipelineConfig:
    """Assemble the effective config: defaults < config file < flags."""
    if args.config is not None:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from exc
        cfg = config_from_items(parse_config(text))
    else:
        cfg = PipelineConfig()

    ace = cfg.ace
    if args.ace_alpha is not None:
        ace = replace(ace, alpha=args.ace_alpha)
    if args.ace_stride is not None:
        stride = None if args.ace_stride == "auto" else _positive_int("--ace-stride", args.ace_stride)
        ace = replace(ace, sample_stride=stride)
    rtv = cfg.rtv
    if args.rtv_lambda is not None:
        rtv = replace(rtv, lam=args.rtv_lambda)
    if args.rtv_iters is not None:
        rtv = replace(rtv, outer_iterations=args.rtv_iters)
    restore = cfg.restore
    if args.patch_radius is not None:
        restore = replace(restore, patch_radius=args.patch_radius)
    if args.t0 is not None:
        restore = replace(restore, t0=args.t0)
    dump = cfg.dump_intermediates
    if args.dump_intermediates is not None:
        dump = args.dump_intermediates
    return PipelineConfig(ace=ace, rtv=rtv, restore=restore, detail=cfg.detail, dump_intermediates=dump)


def _expand_inputs(raw_paths) -> list[Path]:
    """Flatten files and directories into one sorted, de-duplicated list.

    Nonexistent paths are kept so that they surface as per-file failures
    instead of aborting the whole batch.
    """
    files: set[Path] = set()
    for raw in raw_paths:
        path = Path(raw)
        if path.is_dir():
            files.update(
                child
                for child in path.iterdir()
                if child.is_file() and child.suffix.lower() in _IMAGE_SUFFIXES
            )
        else:
            files.add(path)
    return sorted(files, key=str)


def _run_batch(files, worker, jobs: int, quiet_stdout: bool = False) -> int:
    """Run worker(file) over the batch; report in input order; 0/1 exit."""

    def guarded(path):
        try:
            return path, True, worker(path)
        except Exception as exc:
            return path, False, str(exc) or type(exc).__name__

    if jobs <= 1:
        results = [guarded(f) for f in files]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(guarded, files))

    failed = 0
    for path, ok, message in results:
        if ok:
            if message and not quiet_stdout:
                print(message)
        else:
            failed += 1
            print(f"error: {path}: {message}", file=sys.stderr)
    return 1 if failed else 0


def _output_dir(out_arg: str | None) -> Path | None:
    if out_arg is None:
        return None
    out = Path(out_arg)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_enhance(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    if args.emit_config:
        sys.stdout.write(emit_config(cfg))
        return 0
    files = _expand_inputs(args.inputs)
    if not files:
        print("error: no input files", file=sys.stderr)
        return 2

    single_file_target = None
    out_dir = None
    if args.output is not None:
        out = Path(args.output)
        # one input plus a .png target means "write exactly here";
        # anything else treats -o as a directory
        if len(files) == 1 and str(args.output).lower().endswith(".png"):
            out.parent.mkdir(parents=True, exist_ok=True)
            single_file_target = out
        else:
            out_dir = _output_dir(args.output)

    def work(path: Path) -> str:
        img = decode_image(path)
        result, _report = enhance(img, cfg, stem=path.stem)
        if single_file_target is not None:
            target = single_file_target
        else:
            base = out_dir if out_dir is not None else path.parent
            target = base / f"{path.stem}.enhanced.png"
        encode_image(result, target)
        return f"wrote {target}"

    return _run_batch(files, work, args.jobs)


def _cmd_decompose(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    if args.emit_config:
        sys.stdout.write(emit_config(cfg))
        return 0
    files = _expand_inputs(args.inputs)
    if not files:
        print("error: no input files", file=sys.stderr)
        return 2
    out_dir = _output_dir(args.output)

    def work(path: Path) -> str:
        img = decode_image(path)
        corrected = ace_correct(img, cfg.ace)
        dec = decompose(corrected, cfg.rtv)
        base = out_dir if out_dir is not None else path.parent
        encode_image(corrected, base / f"{path.stem}.corrected.png")
        encode_image(dec.structure, base / f"{path.stem}.structure.png")
        viz = np.clip(TEXTURE_VIZ_GAIN * dec.texture + TEXTURE_VIZ_OFFSET, 0.0, 1.0)
        encode_image(viz, base / f"{path.stem}.texture.png")
        return f"wrote {base / path.stem}.{{corrected,structure,texture}}.png"

    return _run_batch(files, work, args.jobs)


def _cmd_metrics(args: argparse.Namespace) -> int:
    files = _expand_inputs(args.inputs)
    if not files:
        print("error: no input files", file=sys.stderr)
        return 2

    def work(path: Path) -> dict:
        img = decode_image(path)
        return {
            "path": str(path),
            "uciqe": uciqe(img),
            "entropy_bits": entropy(img),
            "ciede2000_mean": None,
        }

    def guarded(path):
        try:
            return path, True, work(path)
        except Exception as exc:
            return path, False, str(exc) or type(exc).__name__

    if args.jobs <= 1:
        results = [guarded(f) for f in files]
    else:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(guarded, files))

    rows = []
    failed = 0
    print("path,uciqe,entropy,ciede2000_mean")
    for path, ok, payload in results:
        if not ok:
            failed += 1
            print(f"error: {path}: {payload}", file=sys.stderr)
            continue
        rows.append(payload)
        print(f"{payload['path']},{payload['uciqe']:.6f},{payload['entropy_bits']:.6f},")
    if args.output is not None:
        out = Path(args.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")
    return 1 if failed else 0


def _cmd_synth(args: argparse.Namespace) -> int:
    if not 0.0 < args.t <= 1.0:
        raise ConfigError(f"--t: transmission must be in (0, 1], got {args.t}")
    light = _parse_light(args.b)
    files = [Path(args.input)]

    def work(path: Path) -> str:
        img = decode_image(path)
        t = np.full(img.shape[:2], args.t)
        degraded = apply_forward_model(img, t, light)
        target = Path(args.output)
        target.parent.mkdir(parents=True, exist_ok=True)
        encode_image(degraded, target)
        return f"wrote {target}"

    return _run_batch(files, work, jobs=1)


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("pipeline configuration")
    group.add_argument("--config", metavar="FILE", help="flat key = value config file")
    group.add_argument("--ace-alpha", type=float, metavar="A", help="color correction slope")
    group.add_argument("--ace-stride", metavar="S", help="sampling stride (integer or 'auto')")
    group.add_argument("--rtv-lambda", type=float, metavar="L", help="smoothing strength")
    group.add_argument("--rtv-iters", type=int, metavar="N", help="reweighting iterations")
    group.add_argument("--patch-radius", type=int, metavar="R", help="dark-channel patch radius")
    group.add_argument("--t0", type=float, metavar="T", help="transmission floor")
    group.add_argument("--dump-intermediates", metavar="DIR", help="write per-stage images and reports here")
    group.add_argument(
        "--emit-config",
        action="store_true",
        help="print the effective configuration and exit without processing",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uwenhance",
        description="Underwater image enhancement via structure/texture decomposition.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_enh = sub.add_parser("enhance", help="run the full enhancement chain")
    p_enh.add_argument("inputs", nargs="+", metavar="PATH", help="image files or directories")
    p_enh.add_argument("-o", "--output", metavar="OUT", help="output file (single .png) or directory")
    p_enh.add_argument("--jobs", type=int, default=1, metavar="N", help="parallel workers (default 1)")
    _add_config_flags(p_enh)
    p_enh.set_defaults(handler=_cmd_enhance)

    p_dec = sub.add_parser("decompose", help="color-correct and split structure/texture only")
    p_dec.add_argument("inputs", nargs="+", metavar="PATH", help="image files or directories")
    p_dec.add_argument("-o", "--output", metavar="DIR", help="output directory (default: alongside inputs)")
    p_dec.add_argument("--jobs", type=int, default=1, metavar="N", help="parallel workers (default 1)")
    _add_config_flags(p_dec)
    p_dec.set_defaults(handler=_cmd_decompose)

    p_met = sub.add_parser("metrics", help="report no-reference quality metrics")
    p_met.add_argument("inputs", nargs="+", metavar="PATH", help="image files or directories")
    p_met.add_argument("-o", "--output", metavar="JSON", help="also write the report as JSON")
    p_met.add_argument("--jobs", type=int, default=1, metavar="N", help="parallel workers (default 1)")
    p_met.set_defaults(handler=_cmd_metrics)

    p_syn = sub.add_parser("synth", help="degrade a clean image with known t and background light")
    p_syn.add_argument("input", metavar="PATH", help="clean input image")
    p_syn.add_argument("--t", type=float, required=True, metavar="T", help="uniform transmission in (0, 1]")
    p_syn.add_argument("--b", required=True, metavar="R,G,B", help="background light per channel in (0, 1)")
    p_syn.add_argument("-o", "--output", required=True, metavar="OUT", help="output .png path")
    p_syn.set_defaults(handler=_cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
