"""Synthetic patch injection and detection-quality metrics.

Stand-ins for trained adversarial patches: square stamps of i.i.d.
noise, checkerboard, solid color, or an arbitrary image file.  The
detector keys only on pixel variation, so untrained textures exercise
the same mechanism.  Everything is deterministic under PatchSpec.seed.

Block-level truth is derived from pixel-level truth as "blocks touching
any patch pixel", so patches that straddle the block grid are counted
honestly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .blocks import CHANNELS, ImageTensor
from .detector import TvGrid
from .errors import ConfigError, PlacementError, ShapeError
from .pipeline import ResurfaceResult
from .pngio import write_bytes_atomic

__all__ = [
    "PatchSpec",
    "DetectionReport",
    "inject_patches",
    "evaluate_detection",
    "export_surface",
    "load_surface",
]

TEXTURES = ("noise", "checkerboard", "solid", "image-file")
PLACEMENT_ATTEMPTS = 1000


@dataclass(frozen=True)
class PatchSpec:
    """Description of a synthetic patch attack.

    area_fraction is the *total* patch area as a fraction of the image;
    each of the ``count`` patches gets area_fraction / count, i.e. a
    side of round(n * sqrt(area_fraction / count)) pixels.  corners=None
    means uniform-random non-overlapping placement; otherwise explicit
    (row, col) top-left corners.  scale_range, when set, draws a
    per-patch side multiplier from [lo, hi] (e.g. (0.7, 1.0)).
    """

    count: int = 1
    area_fraction: float = 0.06
    texture: str = "noise"
    corners: tuple[tuple[int, int], ...] | None = None
    texture_path: str | None = None
    solid_value: float = 1.0
    scale_range: tuple[float, float] | None = None
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError(f"patch count must be >= 1, got {self.count}")
        if not 0.0 < self.area_fraction < 1.0:
            raise ConfigError(
                f"area_fraction must lie in (0, 1), got {self.area_fraction}"
            )
        if self.texture not in TEXTURES:
            raise ConfigError(f"unknown texture {self.texture!r}; known: {TEXTURES}")
        if self.texture == "image-file" and not self.texture_path:
            raise ConfigError("texture 'image-file' requires texture_path")
        if self.corners is not None:
            corners = tuple((int(r), int(c)) for r, c in self.corners)
            if len(corners) != self.count:
                raise ConfigError(
                    f"got {len(corners)} corners for {self.count} patches"
                )
            object.__setattr__(self, "corners", corners)
        if not 0.0 <= self.solid_value <= 1.0:
            raise ConfigError("solid_value must lie in [0, 1]")
        if self.scale_range is not None:
            lo, hi = self.scale_range
            if not (0.0 < lo <= hi <= 1.0):
                raise ConfigError(f"scale_range must satisfy 0 < lo <= hi <= 1, got {self.scale_range}")

    @property
    def per_patch_area(self) -> float:
        return self.area_fraction / self.count


def _patch_texture(spec: PatchSpec, side: int, rng: np.random.Generator) -> np.ndarray:
    """(3, side, side) intensities for one patch."""
    if spec.texture == "noise":
        return rng.random((CHANNELS, side, side))
    if spec.texture == "checkerboard":
        i, j = np.indices((side, side))
        board = ((i + j) % 2).astype(np.float64)
        return np.broadcast_to(board, (CHANNELS, side, side)).copy()
    if spec.texture == "solid":
        return np.full((CHANNELS, side, side), spec.solid_value)
    with Image.open(spec.texture_path) as im:
        im = im.convert("RGB").resize((side, side), Image.BILINEAR)
        arr = np.asarray(im, dtype=np.float64) / 255.0
    return arr.transpose(2, 0, 1)


def _draw_corners(
    spec: PatchSpec, n: int, sides: list[int], rng: np.random.Generator
) -> list[tuple[int, int]]:
    if spec.corners is not None:
        corners = list(spec.corners)
        rects = []
        for (r, c), s in zip(corners, sides):
            if r < 0 or c < 0 or r + s > n or c + s > n:
                raise PlacementError(
                    f"patch at ({r}, {c}) with side {s} leaves the {n}x{n} image"
                )
            for r2, c2, s2 in rects:
                if r < r2 + s2 and r2 < r + s and c < c2 + s2 and c2 < c + s:
                    raise PlacementError("explicit patch corners overlap")
            rects.append((r, c, s))
        return corners

    corners: list[tuple[int, int]] = []
    rects: list[tuple[int, int, int]] = []
    attempts = 0
    for s in sides:
        if s > n:
            raise PlacementError(f"patch side {s} exceeds image side {n}")
        while True:
            if attempts >= PLACEMENT_ATTEMPTS:
                raise PlacementError(
                    f"could not place {spec.count} disjoint patches in "
                    f"{PLACEMENT_ATTEMPTS} attempts"
                )
            attempts += 1
            r = int(rng.integers(0, n - s + 1))
            c = int(rng.integers(0, n - s + 1))
            if all(
                not (r < r2 + s2 and r2 < r + s and c < c2 + s2 and c2 < c + s)
                for r2, c2, s2 in rects
            ):
                corners.append((r, c))
                rects.append((r, c, s))
                break
    return corners


def inject_patches(x: ImageTensor, spec: PatchSpec) -> tuple[ImageTensor, np.ndarray]:
    """Stamp the patches into a copy of ``x``.

    Returns the patched image and the (n, n) {0, 1} pixel-level ground
    truth marking stamped pixels.
    """
    rng = np.random.default_rng(spec.seed)
    n = x.side
    base_side = int(round(n * math.sqrt(spec.per_patch_area)))
    base_side = max(base_side, 1)

    sides = []
    for _ in range(spec.count):
        if spec.scale_range is None:
            sides.append(base_side)
        else:
            lo, hi = spec.scale_range
            sides.append(max(1, int(round(base_side * rng.uniform(lo, hi)))))

    corners = _draw_corners(spec, n, sides, rng)

    data = np.array(x.data)
    truth = np.zeros((n, n), dtype=np.uint8)
    for (r, c), s in zip(corners, sides):
        data[:, r : r + s, c : c + s] = _patch_texture(spec, s, rng)
        truth[r : r + s, c : c + s] = 1
    return ImageTensor(data), truth


def _blocks_touching(truth: np.ndarray, k: int) -> frozenset[int]:
    n = truth.shape[0]
    nrow = n // k
    tiles = truth.reshape(nrow, k, nrow, k).any(axis=(1, 3))  # (nrow, nrow)
    return frozenset(int(b) for b in np.nonzero(tiles.reshape(-1))[0])


@dataclass(frozen=True)
class DetectionReport:
    """Block-level detection quality of one resurfacing run.

    precision / recall / IoU compare the channel-unioned flagged blocks
    against blocks touching any patch pixel.  residual_overlap is the
    fraction of patch pixels no channel masked; 0 means the patch was
    fully covered.
    """

    true_patch_blocks: frozenset[int]
    flagged_per_channel: tuple[frozenset[int], frozenset[int], frozenset[int]]
    flagged_union: frozenset[int]
    precision: float
    recall: float
    iou: float
    residual_overlap: float

    def to_dict(self) -> dict:
        return {
            "true_patch_blocks": sorted(self.true_patch_blocks),
            "flagged_per_channel": [sorted(s) for s in self.flagged_per_channel],
            "flagged_union": sorted(self.flagged_union),
            "precision": self.precision,
            "recall": self.recall,
            "iou": self.iou,
            "residual_overlap": self.residual_overlap,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DetectionReport":
        return cls(
            true_patch_blocks=frozenset(d["true_patch_blocks"]),
            flagged_per_channel=tuple(
                frozenset(s) for s in d["flagged_per_channel"]
            ),
            flagged_union=frozenset(d["flagged_union"]),
            precision=float(d["precision"]),
            recall=float(d["recall"]),
            iou=float(d["iou"]),
            residual_overlap=float(d["residual_overlap"]),
        )

    def save(self, path) -> None:
        write_bytes_atomic(path, (json.dumps(self.to_dict(), indent=2) + "\n").encode())

    @classmethod
    def load(cls, path) -> "DetectionReport":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def evaluate_detection(result: ResurfaceResult, truth: np.ndarray) -> DetectionReport:
    """Compare what the pipeline masked against pixel-level ground truth."""
    truth = np.asarray(truth)
    mask = result.mask
    n = mask.side
    if truth.shape != (n, n):
        raise ShapeError(f"truth shape {truth.shape} does not match image side {n}")
    k = mask.block_side
    nrow = n // k

    truth_blocks = _blocks_touching(truth, k)
    tiles = mask.data.reshape(CHANNELS, nrow, k, nrow, k)
    per_channel_grid = tiles.max(axis=(2, 4)).reshape(CHANNELS, -1)  # (3, nk)
    flagged_per_channel = tuple(
        frozenset(int(b) for b in np.nonzero(per_channel_grid[c])[0])
        for c in range(CHANNELS)
    )
    flagged_union = frozenset().union(*flagged_per_channel)

    hit = len(flagged_union & truth_blocks)
    precision = hit / len(flagged_union) if flagged_union else 1.0
    recall = hit / len(truth_blocks) if truth_blocks else 1.0
    union = len(flagged_union | truth_blocks)
    iou = hit / union if union else 1.0

    patch_pixels = int(truth.sum())
    if patch_pixels:
        covered = mask.data.max(axis=0) == 1.0  # masked in at least one channel
        surviving = int(((truth != 0) & ~covered).sum())
        residual = surviving / patch_pixels
    else:
        residual = 0.0

    return DetectionReport(
        true_patch_blocks=truth_blocks,
        flagged_per_channel=flagged_per_channel,
        flagged_union=flagged_union,
        precision=precision,
        recall=recall,
        iou=iou,
        residual_overlap=residual,
    )


def export_surface(grid: TvGrid, path) -> None:
    """Write the score landscape as JSON.

    Layout: per-channel nrow x nrow score matrices, per-channel
    thresholds, and the channel-averaged matrix used for surface-style
    rendering.
    """
    r = grid.nrow
    channels = grid.scores.reshape(CHANNELS, r, r)
    payload = {
        "block_size": grid.block_side,
        "nrow": r,
        "channels": [m.tolist() for m in channels],
        "thresholds": grid.thresholds.tolist(),
        "mean": channels.mean(axis=0).tolist(),
    }
    write_bytes_atomic(path, (json.dumps(payload, indent=2) + "\n").encode())


def load_surface(path) -> TvGrid:
    """Re-parse an exported surface file back into a score grid."""
    with open(path) as fh:
        d = json.load(fh)
    r = int(d["nrow"])
    scores = np.asarray(d["channels"], dtype=np.float64).reshape(CHANNELS, r * r)
    return TvGrid(
        block_side=int(d["block_size"]),
        nrow=r,
        scores=scores,
        thresholds=np.asarray(d["thresholds"], dtype=np.float64),
    )
