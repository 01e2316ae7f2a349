"""Command-line front end.

Subcommands:
    resurface   clean one PNG (or every PNG in a directory)
    inject      stamp synthetic patches into a PNG
    eval        resurface a patched PNG and score detection vs. truth
    surface     export the TV score landscape only
    sweep       resurface at block sizes 7/14/28/56/112, one report each

Exit codes: 0 success, 1 usage error, 2 processing error.  Artifacts are
written to a temp file and renamed, never left half-written.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .detector import DetectorConfig, flag_blocks
from .errors import ResurfaceError
from .harness import (
    DetectionReport,
    PatchSpec,
    evaluate_detection,
    export_surface,
    inject_patches,
)
from .pipeline import (
    BRIDGE_TMPDIR_ENV,
    ResurfaceConfig,
    ResurfaceResult,
    available_inpainters,
    resurface,
)
from .pngio import (
    load_image,
    load_pixel_mask,
    save_image,
    save_mask,
    save_pixel_mask,
    write_bytes_atomic,
)

__all__ = ["CliConfig", "parse_cli", "run", "main", "SWEEP_BLOCK_SIZES", "UsageError"]

SWEEP_BLOCK_SIZES = (7, 14, 28, 56, 112)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1, not argparse's default 2
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


@dataclass(frozen=True)
class CliConfig:
    """Parsed command line; same argv always maps to the same config."""

    subcommand: str
    input: Path
    output: Path
    truth: Path | None = None
    block_size: int = 28
    iqr_factor: float = 1.5
    inpaint: str = "diffusion"
    channel_union: bool = False
    bridge_command: tuple[str, ...] | None = None
    patches: int = 1
    area: float = 0.06
    texture: str = "noise"
    texture_file: str | None = None
    solid_value: float = 1.0
    corners: tuple[tuple[int, int], ...] | None = None
    seed: int = 0


def _add_detector_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--block-size", type=int, default=28, help="tile side in pixels")
    p.add_argument("--iqr-factor", type=float, default=1.5, help="outlier threshold multiplier")


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    _add_detector_flags(p)
    p.add_argument(
        "--inpaint",
        default="diffusion",
        help=f"inpainting method, one of: {', '.join(available_inpainters())}",
    )
    p.add_argument(
        "--channel-union",
        action="store_true",
        help="mask a flagged block in all three channels, not just its own",
    )
    p.add_argument(
        "--bridge-cmd",
        nargs="+",
        default=None,
        metavar="ARG",
        help="command for --inpaint external-bridge (the workspace dir is appended)",
    )


def _add_patch_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--patches", type=int, default=1, help="number of patches")
    p.add_argument("--area", type=float, default=0.06, help="total patch area fraction")
    p.add_argument(
        "--texture",
        default="noise",
        choices=("noise", "checkerboard", "solid", "image-file"),
        help="patch fill texture",
    )
    p.add_argument("--texture-file", default=None, help="image for --texture image-file")
    p.add_argument("--solid-value", type=float, default=1.0, help="intensity for --texture solid")
    p.add_argument(
        "--corner",
        type=int,
        nargs=2,
        action="append",
        default=None,
        metavar=("ROW", "COL"),
        help="explicit top-left corner; repeat once per patch",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="resurface",
        description="Detect and remove localized high-variation patches from images.",
        epilog=(
            f"The {BRIDGE_TMPDIR_ENV} environment variable overrides where "
            "external-bridge workspaces are created."
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("resurface", help="clean an image (or a directory of images)", formatter_class=fmt)
    p.add_argument("--input", required=True, type=Path, help="input PNG or directory of PNGs")
    p.add_argument("--output-dir", required=True, type=Path, help="where artifacts are written")
    _add_pipeline_flags(p)

    p = sub.add_parser("inject", help="stamp synthetic patches into an image", formatter_class=fmt)
    p.add_argument("--input", required=True, type=Path, help="clean input PNG")
    p.add_argument("--output-dir", required=True, type=Path, help="where patched.png/truth.png go")
    _add_patch_flags(p)
    p.add_argument("--seed", type=int, default=0, help="placement/texture seed")

    p = sub.add_parser("eval", help="score detection against a ground-truth mask", formatter_class=fmt)
    p.add_argument("--input", required=True, type=Path, help="patched input PNG")
    p.add_argument("--truth", required=True, type=Path, help="ground-truth mask PNG")
    p.add_argument("--output", required=True, type=Path, help="report JSON path")
    _add_pipeline_flags(p)

    p = sub.add_parser("surface", help="export the TV score landscape", formatter_class=fmt)
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--output", required=True, type=Path, help="surface JSON path")
    _add_detector_flags(p)

    p = sub.add_parser("sweep", help="resurface at several block sizes", formatter_class=fmt)
    p.add_argument("--input", required=True, type=Path)
    p.add_argument("--truth", type=Path, default=None, help="optional ground-truth mask PNG")
    p.add_argument("--output-dir", required=True, type=Path)
    _add_pipeline_flags(p)

    return parser


def parse_cli(argv=None) -> CliConfig:
    ns = build_parser().parse_args(argv)
    d = vars(ns)
    corners = d.get("corner")
    return CliConfig(
        subcommand=ns.subcommand,
        input=d["input"],
        output=d.get("output_dir") or d.get("output"),
        truth=d.get("truth"),
        block_size=d.get("block_size", 28),
        iqr_factor=d.get("iqr_factor", 1.5),
        inpaint=d.get("inpaint", "diffusion"),
        channel_union=bool(d.get("channel_union", False)),
        bridge_command=tuple(d["bridge_cmd"]) if d.get("bridge_cmd") else None,
        patches=d.get("patches", 1),
        area=d.get("area", 0.06),
        texture=d.get("texture", "noise"),
        texture_file=d.get("texture_file"),
        solid_value=d.get("solid_value", 1.0),
        corners=tuple((r, c) for r, c in corners) if corners else None,
        seed=d.get("seed", 0),
    )


def _pipeline_config(cfg: CliConfig) -> ResurfaceConfig:
    return ResurfaceConfig(
        detector=DetectorConfig(block_side=cfg.block_size, iqr_factor=cfg.iqr_factor),
        channel_union=cfg.channel_union,
        inpainter=cfg.inpaint,
        bridge_command=cfg.bridge_command,
    )


def _write_result(result: ResurfaceResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    save_image(result.reconstructed, out_dir / "reconstructed.png")
    save_image(result.cropped, out_dir / "cropped.png")
    save_mask(result.mask, out_dir / "mask.png")
    export_surface(result.grid, out_dir / "surface.json")


def _run_resurface(cfg: CliConfig) -> None:
    pipeline_cfg = _pipeline_config(cfg)
    if cfg.input.is_dir():
        pngs = sorted(cfg.input.glob("*.png"))
        if not pngs:
            raise FileNotFoundError(f"no .png files in directory {cfg.input}")
        for path in pngs:
            result = resurface(load_image(path), pipeline_cfg)
            _write_result(result, cfg.output / path.stem)
    else:
        result = resurface(load_image(cfg.input), pipeline_cfg)
        _write_result(result, cfg.output)


def _run_inject(cfg: CliConfig) -> None:
    spec = PatchSpec(
        count=cfg.patches,
        area_fraction=cfg.area,
        texture=cfg.texture,
        corners=cfg.corners,
        texture_path=cfg.texture_file,
        solid_value=cfg.solid_value,
        seed=cfg.seed,
    )
    patched, truth = inject_patches(load_image(cfg.input), spec)
    cfg.output.mkdir(parents=True, exist_ok=True)
    save_image(patched, cfg.output / "patched.png")
    save_pixel_mask(truth, cfg.output / "truth.png")


def _run_eval(cfg: CliConfig) -> None:
    result = resurface(load_image(cfg.input), _pipeline_config(cfg))
    truth = load_pixel_mask(cfg.truth)
    report = evaluate_detection(result, truth)
    cfg.output.parent.mkdir(parents=True, exist_ok=True)
    report.save(cfg.output)


def _run_surface(cfg: CliConfig) -> None:
    from .blocks import image_to_block
    from .detector import score_grid

    det = DetectorConfig(block_side=cfg.block_size, iqr_factor=cfg.iqr_factor)
    grid = score_grid(image_to_block(load_image(cfg.input), det.block_side), det)
    cfg.output.parent.mkdir(parents=True, exist_ok=True)
    export_surface(grid, cfg.output)


def _sweep_entry(result: ResurfaceResult, report: DetectionReport | None) -> dict:
    grid = result.grid
    flags = flag_blocks(grid)
    entry = {
        "block_size": grid.block_side,
        "nrow": grid.nrow,
        "thresholds": grid.thresholds.tolist(),
        "flagged_per_channel": [
            sorted(b for c, b in flags if c == ch) for ch in range(3)
        ],
        "flagged_union": sorted({b for _, b in flags}),
    }
    if report is not None:
        entry["detection"] = report.to_dict()
    return entry


def _run_sweep(cfg: CliConfig) -> None:
    image = load_image(cfg.input)
    truth = load_pixel_mask(cfg.truth) if cfg.truth else None
    cfg.output.mkdir(parents=True, exist_ok=True)
    for size in SWEEP_BLOCK_SIZES:
        pipeline_cfg = ResurfaceConfig(
            detector=DetectorConfig(block_side=size, iqr_factor=cfg.iqr_factor),
            channel_union=cfg.channel_union,
            inpainter=cfg.inpaint,
            bridge_command=cfg.bridge_command,
        )
        result = resurface(image, pipeline_cfg)
        report = evaluate_detection(result, truth) if truth is not None else None
        entry = _sweep_entry(result, report)
        write_bytes_atomic(
            cfg.output / f"report_k{size}.json",
            (json.dumps(entry, indent=2) + "\n").encode(),
        )


_RUNNERS = {
    "resurface": _run_resurface,
    "inject": _run_inject,
    "eval": _run_eval,
    "surface": _run_surface,
    "sweep": _run_sweep,
}


def run(argv=None) -> int:
    try:
        cfg = parse_cli(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    try:
        _RUNNERS[cfg.subcommand](cfg)
    except (ResurfaceError, OSError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
