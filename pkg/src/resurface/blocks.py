"""Image / block-set data model and the bijective tiling between them.

An image is a 3-channel square tensor of unit-interval intensities.  A
block set is the same data re-indexed as equal ``k x k`` tiles, channel
major, with blocks numbered row-major over the block grid:

    blocks[c][b][i][j] == image[c][(b // nrow) * k + i][(b % nrow) * k + j]

where ``nrow = n // k`` is the number of blocks per grid row.  The maps in
both directions are pure re-indexings; no value is transformed, so a
round trip is bit-exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError, TilingError

__all__ = [
    "ImageTensor",
    "BlockSet",
    "MaskSet",
    "Mask",
    "image_to_block",
    "block_to_image",
    "mask_to_image",
]

CHANNELS = 3


def _frozen_f64(arr) -> np.ndarray:
    """Copy to float64 and make the copy read-only."""
    out = np.array(arr, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


def _check_unit_interval(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} contains non-finite values")
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise DomainError(f"{what} intensities must lie in [0, 1]")


def _check_binary(arr: np.ndarray, what: str) -> None:
    if not np.all((arr == 0.0) | (arr == 1.0)):
        raise DomainError(f"{what} entries must be exactly 0 or 1")


@dataclass(frozen=True, eq=False)
class ImageTensor:
    """3-channel square image, intensities in [0, 1], shape (3, n, n)."""

    data: np.ndarray

    def __post_init__(self):
        arr = _frozen_f64(self.data)
        if arr.ndim != 3 or arr.shape[0] != CHANNELS or arr.shape[1] != arr.shape[2]:
            raise ShapeError(f"image must have shape (3, n, n), got {arr.shape}")
        if arr.shape[1] < 1:
            raise ShapeError("image side must be at least 1 pixel")
        _check_unit_interval(arr, "image")
        object.__setattr__(self, "data", arr)

    @property
    def side(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True, eq=False)
class BlockSet:
    """Channel-major collection of k x k tiles, shape (3, nk, k, k).

    nk must be a perfect square (the image it tiles is square), with
    nrow = sqrt(nk) blocks per grid row.
    """

    blocks: np.ndarray

    def __post_init__(self):
        arr = _frozen_f64(self.blocks)
        if arr.ndim != 4 or arr.shape[0] != CHANNELS or arr.shape[2] != arr.shape[3]:
            raise ShapeError(f"block set must have shape (3, nk, k, k), got {arr.shape}")
        nk, k = arr.shape[1], arr.shape[2]
        if k < 1 or nk < 1:
            raise ShapeError(f"block set must be non-empty, got {arr.shape}")
        nrow = int(round(nk ** 0.5))
        if nrow * nrow != nk:
            raise ShapeError(
                f"block count {nk} is not a perfect tiling of a square image"
            )
        _check_unit_interval(arr, "block set")
        object.__setattr__(self, "blocks", arr)

    @property
    def block_side(self) -> int:
        return self.blocks.shape[2]

    @property
    def block_count(self) -> int:
        return self.blocks.shape[1]

    @property
    def nrow(self) -> int:
        return int(round(self.block_count ** 0.5))


@dataclass(frozen=True, eq=False)
class MaskSet:
    """Block set restricted to {0, 1}, constant within each (channel, block)."""

    blocks: np.ndarray

    def __post_init__(self):
        arr = _frozen_f64(self.blocks)
        if arr.ndim != 4 or arr.shape[0] != CHANNELS or arr.shape[2] != arr.shape[3]:
            raise ShapeError(f"mask set must have shape (3, nk, k, k), got {arr.shape}")
        nk = arr.shape[1]
        nrow = int(round(nk ** 0.5))
        if nrow * nrow != nk:
            raise ShapeError(
                f"mask-set block count {nk} is not a perfect tiling of a square image"
            )
        _check_binary(arr, "mask set")
        # Masking is block-granular: a block is either fully on or fully off.
        if not np.all(arr == arr[:, :, :1, :1]):
            raise DomainError("mask-set blocks must be constant per (channel, block)")
        object.__setattr__(self, "blocks", arr)

    @property
    def block_side(self) -> int:
        return self.blocks.shape[2]

    @property
    def block_count(self) -> int:
        return self.blocks.shape[1]

    @property
    def nrow(self) -> int:
        return int(round(self.block_count ** 0.5))


@dataclass(frozen=True, eq=False)
class Mask:
    """Image-shaped binary tensor, constant over each k x k tile per channel."""

    data: np.ndarray
    block_side: int

    def __post_init__(self):
        arr = _frozen_f64(self.data)
        if arr.ndim != 3 or arr.shape[0] != CHANNELS or arr.shape[1] != arr.shape[2]:
            raise ShapeError(f"mask must have shape (3, n, n), got {arr.shape}")
        k = self.block_side
        n = arr.shape[1]
        if k < 1 or n % k != 0:
            raise TilingError(f"mask side {n} is not tiled by block side {k}")
        _check_binary(arr, "mask")
        nrow = n // k
        tiles = arr.reshape(CHANNELS, nrow, k, nrow, k)
        if not np.all(tiles == tiles[:, :, :1, :, :1]):
            raise DomainError("mask must be constant over each block per channel")
        object.__setattr__(self, "data", arr)

    @property
    def side(self) -> int:
        return self.data.shape[1]


def _tile(data: np.ndarray, k: int) -> np.ndarray:
    """(3, n, n) -> (3, nk, k, k) with blocks row-major over the grid."""
    n = data.shape[1]
    nrow = n // k
    out = data.reshape(CHANNELS, nrow, k, nrow, k)  # (3, br, i, bc, j)
    out = out.transpose(0, 1, 3, 2, 4)              # (3, br, bc, i, j)
    return out.reshape(CHANNELS, nrow * nrow, k, k)


def _untile(blocks: np.ndarray) -> np.ndarray:
    """(3, nk, k, k) -> (3, n, n); exact inverse of :func:`_tile`."""
    nk, k = blocks.shape[1], blocks.shape[2]
    nrow = int(round(nk ** 0.5))
    out = blocks.reshape(CHANNELS, nrow, nrow, k, k)  # (3, br, bc, i, j)
    out = out.transpose(0, 1, 3, 2, 4)                # (3, br, i, bc, j)
    return out.reshape(CHANNELS, nrow * k, nrow * k)


def image_to_block(x: ImageTensor, k: int) -> BlockSet:
    """Tile an image into its block set.

    ``k`` must divide the image side exactly; partial border blocks are
    never created because padding would distort border statistics
    downstream.

    Raises:
        TilingError: if ``k`` does not divide the image side (including
            ``k`` larger than the side) or ``k < 1``.
    """
    n = x.side
    if k < 1 or n % k != 0:
        raise TilingError(
            f"block side {k} does not tile a {n}x{n} image exactly "
            f"(need k >= 1 and k | n)"
        )
    return BlockSet(_tile(x.data, k))


def block_to_image(bs: BlockSet) -> ImageTensor:
    """Reassemble an image from its block set (exact inverse of
    :func:`image_to_block`)."""
    return ImageTensor(_untile(bs.blocks))


def mask_to_image(ms: MaskSet) -> Mask:
    """Flatten a mask set into an image-shaped binary mask, same index
    law as :func:`block_to_image`."""
    return Mask(_untile(ms.blocks), block_side=ms.block_side)
