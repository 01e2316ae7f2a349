"""End-to-end resurfacing: crop suspect blocks, build the mask, inpaint,
and compose the cleansed image.

The composition rule is

    reconstructed = (1 - m) * cropped + m * generated

applied entrywise with a binary mask m, then clamped to [0, 1].  Only
the generated values under the mask matter; everything else is taken
from the cropped image.

Inpainting is pluggable.  Built-ins (``zero``, ``mean-fill``,
``diffusion``) keep the pipeline free of learned components; the
``external-bridge`` method shells out to any command speaking the file
protocol below, e.g. a trained generator.

Bridge protocol: the pipeline writes ``cropped.png`` and ``mask.png``
(8-bit, mask entries 0 or 255) into a fresh temporary directory and
invokes the configured command with that directory as its single
appended argument.  The command must exit 0 after writing
``generated.png`` with identical dimensions.  The temporary directory's
parent can be overridden with the RESURFACE_BRIDGE_TMPDIR environment
variable.
"""

from __future__ import annotations

import os
import shutil
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .blocks import (
    CHANNELS,
    BlockSet,
    ImageTensor,
    Mask,
    MaskSet,
    block_to_image,
    image_to_block,
    mask_to_image,
)
from .detector import DetectorConfig, TvGrid, flag_blocks, score_grid
from .errors import BridgeError, ConfigError, ShapeError
from .pngio import load_image, save_image, save_mask

__all__ = [
    "ResurfaceConfig",
    "ResurfaceResult",
    "crop_and_mask",
    "inpaint",
    "compose",
    "resurface",
    "register_inpainter",
    "available_inpainters",
    "BRIDGE_TMPDIR_ENV",
]

BRIDGE_TMPDIR_ENV = "RESURFACE_BRIDGE_TMPDIR"

DIFFUSION_TOL = 1e-4
DIFFUSION_MAX_ITER = 10_000

Inpainter = Callable[[ImageTensor, Mask], ImageTensor]


def _zero_fill(cropped: ImageTensor, mask: Mask) -> ImageTensor:
    return cropped


def _mean_fill(cropped: ImageTensor, mask: Mask) -> ImageTensor:
    """Fill each masked block with the mean of that channel's unmasked
    pixels (0 if the whole channel is masked)."""
    out = np.array(cropped.data)
    for c in range(CHANNELS):
        keep = mask.data[c] == 0.0
        fill = float(out[c][keep].mean()) if keep.any() else 0.0
        out[c][~keep] = fill
    return ImageTensor(out)


def _diffusion_fill(cropped: ImageTensor, mask: Mask) -> ImageTensor:
    """Harmonic hole filling: repeatedly replace each masked pixel by the
    mean of its in-bounds 4-neighbors, unmasked pixels held fixed, until
    the largest update drops below DIFFUSION_TOL or the iteration cap."""
    u = np.array(cropped.data)
    hole = mask.data == 1.0
    if not hole.any():
        return cropped

    count = np.zeros(u.shape[1:])
    count[1:, :] += 1.0
    count[:-1, :] += 1.0
    count[:, 1:] += 1.0
    count[:, :-1] += 1.0

    for _ in range(DIFFUSION_MAX_ITER):
        nbr = np.zeros_like(u)
        nbr[:, 1:, :] += u[:, :-1, :]
        nbr[:, :-1, :] += u[:, 1:, :]
        nbr[:, :, 1:] += u[:, :, :-1]
        nbr[:, :, :-1] += u[:, :, 1:]
        new = nbr / count
        delta = np.abs(new[hole] - u[hole]).max()
        u[hole] = new[hole]
        if delta < DIFFUSION_TOL:
            break
    return ImageTensor(np.clip(u, 0.0, 1.0))


_INPAINTERS: dict[str, Inpainter] = {
    "zero": _zero_fill,
    "mean-fill": _mean_fill,
    "diffusion": _diffusion_fill,
}

EXTERNAL_BRIDGE = "external-bridge"


def register_inpainter(name: str, fn: Inpainter) -> None:
    """Register a custom inpainting method under ``name``."""
    if name == EXTERNAL_BRIDGE:
        raise ConfigError(f"{EXTERNAL_BRIDGE!r} is reserved for the subprocess bridge")
    _INPAINTERS[name] = fn


def available_inpainters() -> tuple[str, ...]:
    return tuple(_INPAINTERS) + (EXTERNAL_BRIDGE,)


@dataclass(frozen=True)
class ResurfaceConfig:
    """Pipeline configuration.

    channel_union=False masks each channel independently (the literal
    per-channel rule); True escalates any flagged block to all three
    channels, treating flags as image-level conclusions.
    """

    detector: DetectorConfig = field(default_factory=DetectorConfig)
    channel_union: bool = False
    inpainter: str = "diffusion"
    bridge_command: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.inpainter not in available_inpainters():
            raise ConfigError(
                f"inpainter {self.inpainter!r} is not registered; "
                f"known: {', '.join(available_inpainters())}"
            )
        if self.inpainter == EXTERNAL_BRIDGE and not self.bridge_command:
            raise ConfigError("external-bridge inpainting requires bridge_command")
        if self.bridge_command is not None:
            object.__setattr__(self, "bridge_command", tuple(self.bridge_command))


@dataclass(frozen=True, eq=False)
class ResurfaceResult:
    """All pipeline intermediates: cropped image, mask, generator output,
    final reconstruction, and the score grid behind the flags."""

    cropped: ImageTensor
    mask: Mask
    generated: ImageTensor
    reconstructed: ImageTensor
    grid: TvGrid


def crop_and_mask(
    x: ImageTensor, flags: Iterable[tuple[int, int]], cfg: ResurfaceConfig
) -> tuple[ImageTensor, Mask]:
    """Zero every flagged block and return the matching binary mask.

    With channel_union, a block flagged in any channel is cropped in all
    three.  Flags outside the block grid raise IndexError.
    """
    k = cfg.detector.block_side
    bs = image_to_block(x, k)
    nk = bs.block_count

    flag_list = list(flags)
    for c, b in flag_list:
        if not (0 <= c < CHANNELS and 0 <= b < nk):
            raise IndexError(f"flag ({c}, {b}) outside 3x{nk} block grid")
    if cfg.channel_union:
        flag_list = [(c, b) for _, b in flag_list for c in range(CHANNELS)]

    blocks = np.array(bs.blocks)
    mask_blocks = np.zeros_like(blocks)
    for c, b in flag_list:
        blocks[c, b] = 0.0
        mask_blocks[c, b] = 1.0

    cropped = block_to_image(BlockSet(blocks))
    mask = mask_to_image(MaskSet(mask_blocks))
    return cropped, mask


def inpaint(
    cropped: ImageTensor,
    mask: Mask,
    method: str,
    bridge_command: Iterable[str] | None = None,
) -> ImageTensor:
    """Produce a full image whose values under the mask fill the holes.

    Values off the mask are irrelevant downstream; composition discards
    them.
    """
    if mask.side != cropped.side:
        raise ShapeError(
            f"mask side {mask.side} does not match image side {cropped.side}"
        )
    if method == EXTERNAL_BRIDGE:
        if not bridge_command:
            raise ConfigError("external-bridge inpainting requires a command")
        return _bridge_inpaint(cropped, mask, tuple(bridge_command))
    try:
        fn = _INPAINTERS[method]
    except KeyError:
        raise ConfigError(f"inpainter {method!r} is not registered") from None
    return fn(cropped, mask)


def _bridge_inpaint(
    cropped: ImageTensor, mask: Mask, command: tuple[str, ...]
) -> ImageTensor:
    tmp_root = os.environ.get(BRIDGE_TMPDIR_ENV) or None
    workdir = Path(tempfile.mkdtemp(prefix="resurface-bridge-", dir=tmp_root))
    try:
        save_image(cropped, workdir / "cropped.png")
        save_mask(mask, workdir / "mask.png")
        argv = list(command) + [str(workdir)]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True)
        except OSError as exc:
            raise BridgeError(f"failed to launch bridge command {argv}: {exc}") from exc
        if proc.returncode != 0:
            raise BridgeError(
                f"bridge command {argv} exited {proc.returncode}\n"
                f"stdout: {proc.stdout}\nstderr: {proc.stderr}"
            )
        out_path = workdir / "generated.png"
        if not out_path.exists():
            raise BridgeError(
                f"bridge command {argv} exited 0 but wrote no generated.png\n"
                f"stdout: {proc.stdout}\nstderr: {proc.stderr}"
            )
        generated = load_image(out_path)
        if generated.side != cropped.side:
            raise BridgeError(
                f"bridge returned a {generated.side}x{generated.side} image "
                f"for a {cropped.side}x{cropped.side} input"
            )
        return generated
    finally:
        shutil.rmtree(workdir, ignore_errors=True)


def compose(cropped: ImageTensor, generated: ImageTensor, mask: Mask) -> ImageTensor:
    """Entrywise (1 - m) * cropped + m * generated, clamped to [0, 1]."""
    if cropped.data.shape != generated.data.shape or cropped.data.shape != mask.data.shape:
        raise ShapeError(
            f"shape mismatch: cropped {cropped.data.shape}, "
            f"generated {generated.data.shape}, mask {mask.data.shape}"
        )
    m = mask.data
    out = (1.0 - m) * cropped.data + m * generated.data
    return ImageTensor(np.clip(out, 0.0, 1.0))


def resurface(x: ImageTensor, cfg: ResurfaceConfig) -> ResurfaceResult:
    """Run the whole pipeline on one image and return all intermediates."""
    bs = image_to_block(x, cfg.detector.block_side)
    grid = score_grid(bs, cfg.detector)
    flags = flag_blocks(grid, cfg.detector.absolute_floor)
    cropped, mask = crop_and_mask(x, flags, cfg)
    generated = inpaint(cropped, mask, cfg.inpainter, cfg.bridge_command)
    reconstructed = compose(cropped, generated, mask)
    return ResurfaceResult(
        cropped=cropped,
        mask=mask,
        generated=generated,
        reconstructed=reconstructed,
        grid=grid,
    )
